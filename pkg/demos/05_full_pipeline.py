"""
The whole pipeline
==================

Raw CSV in, report directory out: discretize, binarize, mine, select and
cross-validate. Point DATA at a copy of the Z-Alizadeh Sani CSV to run on
real data; by default a synthetic cohort is written first.
"""

import os
import tempfile
from pathlib import Path

from cadpipe import load_config
from cadpipe.config import shipped_config_path
from cadpipe.dataset import write_dataset
from cadpipe.gafs import GaConfig
from cadpipe.miner import MinerConfig
from cadpipe.pipeline import PipelineConfig, run_pipeline
from cadpipe.synthetic import make_cohort

out = Path(tempfile.mkdtemp(prefix="cadpipe-"))
data = os.environ.get("DATA")
if data is None:
    data = out / "synthetic.csv"
    write_dataset(make_cohort(load_config(), seed=3), data)

# small GA settings keep the demo quick
cfg = PipelineConfig(Path(data), shipped_config_path(), out / "report",
                     miner=MinerConfig(0.4), ga=GaConfig(population_size=10, max_generations=5))
rep = run_pipeline(cfg)

print(f"{rep.n_itemsets} itemsets, {rep.n_augmented_features} augmented columns, "
      f"{len(rep.selected_features)} selected")
print("\n".join(rep.metrics.lines()[4:10]))
print("artifacts in", rep.report_dir)
