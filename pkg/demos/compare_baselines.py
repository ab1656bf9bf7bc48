"""End to end: release a 90-day stream and compare against fixed schedules.

The adaptive release spends budget only on sampling days, so each of them
gets a larger share than the uniform schedule's epsilon / w per day.
"""

from redpoctor import PipelineConfig, generate_synthetic, run_baseline, run_stream

stream = generate_synthetic(7, 90, "mixed")
print(f"{'eps':>5} {'redpoctor':>10} {'uniform':>10} {'sample_fixed':>13}")
for eps in (0.1, 0.5, 1.0, 3.0):
    config = PipelineConfig(epsilon_total=eps)
    ours = run_stream(config, stream)[1].mae
    uniform = run_baseline("uniform", config, stream)[1].mae
    fixed = run_baseline("sample_fixed", config, stream)[1].mae
    print(f"{eps:>5} {ours:>10.2f} {uniform:>10.2f} {fixed:>13.2f}")
