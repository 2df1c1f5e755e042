"""Bundled datasets.

`segmentation_rpi0.csv` holds measured (accuracy, single-frame time) results
for semantic-segmentation models on a Raspberry Pi Zero 2: four networks,
three frameworks, seven compression settings, at 513px and 284px inputs.
It is the default oracle for searches and the fixture for the test suite.
"""

from importlib import resources
from pathlib import Path

BUNDLED_DATASET = "segmentation_rpi0.csv"


def bundled_dataset_path() -> Path:
    return Path(str(resources.files(__name__).joinpath(BUNDLED_DATASET)))
