"""Adaptive sampling: a steady signal is sampled less and less often.

On a flat stream consecutive releases correlate strongly, the controller
error stays low and the interval between sampling days grows until it
reaches the window length. The sick profile changes shape from day to day,
so its releases decorrelate and the controller keeps sampling daily.
"""

from redpoctor import FilterParams, PipelineConfig, generate_synthetic, run_stream

for profile in ("constant", "sick"):
    stream = generate_synthetic(0, 60, profile)
    records, report = run_stream(PipelineConfig(epsilon_total=1000.0, filter=FilterParams(enabled=False)), stream)
    intervals = [r.interval_next for r in records if r.sampled]
    print(f"{profile:<9} sampling days {report.sample_days}")
    print(f"{'':<9} intervals     {intervals}")
