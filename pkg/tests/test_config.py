import pytest

from redpoctor import PipelineConfig
from redpoctor.config import (
    apply_overrides,
    config_keys,
    config_to_flat,
    format_config,
    load_config,
    parse_config_text,
)
from redpoctor.errors import ConfigError


def test_every_field_is_addressable():
    keys = config_keys()
    for key in ["w", "epsilon_total", "allocation.q", "sampler.health_term_composition", "partition.t_s",
                "sensitivity.alpha", "features.hr_max", "filter.n_particles", "eq10_literal_max", "seed"]:
        assert key in keys
    assert set(keys) == set(config_to_flat(PipelineConfig()))


def test_file_and_overrides(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text(
        "# experiment\n"
        "w = 28\n"
        "epsilon_total = 1   # inline comment\n"
        "\n"
        "sensitivity.alpha = 150/14\n"
        "filter.enabled = no\n"
        "sampler.max_interval = none\n"
    )
    c = load_config(path, ["w=7", "eps=0.5"])
    assert c.w == 7 and c.epsilon_total == 0.5
    assert c.sensitivity.alpha == 150 / 14
    assert c.filter.enabled is False and c.sampler.max_interval is None


def test_flat_round_trip():
    c = load_config(None, ["allocation.epsilon_max=1.25", "sampler.health_term_composition=min", "seed=9"])
    assert apply_overrides(PipelineConfig(), parse_config_text(format_config(config_to_flat(c)))) == c


@pytest.mark.parametrize(
    "override",
    ["nosuch=1", "allocation=1", "w=abc", "w=0", "filter.enabled=maybe", "sampler.max_interval.x=1", "epsilon_total=1/0"],
)
def test_bad_overrides(override):
    with pytest.raises(ConfigError):
        load_config(None, [override])


def test_malformed_line_reports_line_number():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("w = 3\nthis is not an assignment\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.txt")
