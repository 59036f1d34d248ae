"""The two benchmark topologies: a 4-node cycle with a split, and a 10-node path."""

from __future__ import annotations

import numpy as np

A_V4 = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.3, 0.7],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
)

A_V10 = np.eye(10, k=1)
