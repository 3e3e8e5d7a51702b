# %% [markdown]
# # Leave-one-out benchmark on a synthetic corpus
#
# The public texture databases cannot be redistributed, so this builds a
# four-class corpus, extracts theta signatures and scores them with LDA under
# leave-one-out. The same run from the shell:
#
#     cnrnn synth corpus --classes 4 --per-class 12 --seed 7
#     cnrnn benchmark corpus --preset theta-4/4-9-14

# %%
import tempfile
from pathlib import Path

from cnrnn.cli import RunConfig, cmd_benchmark, cmd_synth
from cnrnn.signature import PRESETS

with tempfile.TemporaryDirectory() as d:
    cmd_synth(d, classes=4, per_class=12, seed=7, size=64)
    for name in ("theta-4/4-9-14", "psi-4-6/4-9-14"):
        report = cmd_benchmark(RunConfig(Path(d), PRESETS[name]))
        print(name)
        print(report.to_table())
        print(report.confusion_csv())
