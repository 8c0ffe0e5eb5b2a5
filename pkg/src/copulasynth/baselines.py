"""Independent-marginal bootstrap generator.

Every variable is drawn i.i.d. from its own marginal with no dependence
between columns. Useful as the diversity-heavy, accuracy-poor end of the
generator spectrum.
"""

from __future__ import annotations

import numpy as np

from .dataset import MarginalTable, MicroTable
from .errors import SynthesisError


def sample_independent(marginals: MarginalTable, n: int, rng) -> MicroTable:
    """n rows with each column sampled independently from its marginal."""
    if n < 0:
        raise SynthesisError("sample size must be >= 0")
    schema = marginals.schema
    codes = np.empty((n, schema.d), dtype=np.int64)
    for i in range(schema.d):
        counts = marginals.counts[i]
        probs = counts / counts.sum()
        codes[:, i] = rng.choice(len(probs), size=n, p=probs)
    return MicroTable(schema, codes)
