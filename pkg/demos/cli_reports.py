"""
Driving experiments from the command line
=========================================

Each ``noisesens`` subcommand runs one experiment and writes a CSV or JSON
report with a ``#`` header.  Here we call the entry point in-process.
"""

import tempfile
from pathlib import Path

from noisesens.cli import main
from noisesens.reports import read_csv

# %%
# Crossing at m = 1 is exactly one half.
main(["perc", "crossing", "--m", "1", "--exact"])

# %%
# The same seed gives the same data, byte for byte.
with tempfile.TemporaryDirectory() as tmp:
    a, b = Path(tmp, "a.csv"), Path(tmp, "b.csv")
    for path in (a, b):
        main(["stability", "--n", "1001", "--eps", "0.01,0.1", "--samples", "20000", "--out", str(path)])
    print("identical:", a.read_text() == b.read_text())
    print(read_csv(a.read_text())[1])

# %%
# Options can come from a key=value file.
with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp, "gauge.cfg")
    cfg.write_text("family = tribes\nt = 3\ns = 3\neps = 0.1,0.2\n")
    main(["gauge", "--config", str(cfg), "--format", "json"])
