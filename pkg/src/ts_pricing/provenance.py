import os
import platform
import subprocess
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=1)
def get_git_rev() -> str:
    try:
        new_cwd = os.path.abspath(os.path.dirname(__file__))
        rev_raw = subprocess.check_output(
            ["git", "rev-parse", "HEAD"], cwd=new_cwd, stderr=subprocess.DEVNULL,
        )
        return rev_raw.decode("utf8").strip()
    except Exception:
        return "unknown"


def describe() -> dict:
    """
    Version information that is written into summary files, so results can
    be traced back to the code and numerics stack that produced them.
    """
    from .__version__ import __version__
    return {
        "ts_pricing": __version__,
        "revision": get_git_rev(),
        "numpy": np.__version__,
        "python": platform.python_version(),
    }
