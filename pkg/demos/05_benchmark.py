"""A small Monte Carlo comparison with CSV output.

Runs a few trials of the built-in normal-mixture experiment, prints the
summary table and writes the per-trial and summary CSV files plus plot data
for the first trial into ./demo_results.  The full comparison is the
``benchmark`` command of the CLI with 100 trials.
"""
from rootdens.bench import builtin_experiment, emit_report, format_summary, run_experiment

for config in builtin_experiment("table1", sizes=[6, 8]):
    report = run_experiment(config, 10)
    print(format_summary(report), "\n")
    for path in emit_report(report, "demo_results", plot_trials=[0]):
        print("wrote", path)
    print()
