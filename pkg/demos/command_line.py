"""
Reproducible runs from the command line
=======================================

Drive the ``ellspiral`` command from Python, write artifacts with a
manifest, and rerun from a config file to get identical bytes.
"""

import json
import tempfile
from pathlib import Path

from ellspiral.cli import main

work = Path(tempfile.mkdtemp())

# without an output directory the primary artifact goes to stdout
main(["holder", "--p", "0.4", "--q", "0.7", "--r", "0.2", "--s", "0.3"])

# with one, every artifact is written next to a manifest
main(["spectrum", "--p", "0.4", "--q", "0.7", "--out", str(work / "first")])
manifest = json.loads((work / "first" / "manifest.json").read_text())
print(json.dumps(manifest["config"]), manifest["artifacts"])

# the same settings through a config file reproduce the CSV exactly
cfg = work / "spectrum.cfg"
cfg.write_text("p = 0.4\nq = 0.7\n")
main(["spectrum", "--config", str(cfg), "--out", str(work / "second")])
same = (work / "first" / "spectrum.csv").read_bytes() == (work / "second" / "spectrum.csv").read_bytes()
print("identical:", same)

# an SVG of the ellipse family
main(["render", "--curve", "C", "--turns", "12", "--out", str(work / "svg")])
