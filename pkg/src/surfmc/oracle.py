"""Brute-force ground truth on small codes.

Enumerates the full stabilizer subgroup (2^n_stab elements, Gray-code order so
each successive frame differs by one stabilizer application) to obtain the
exact weight histogram of an equivalence class, and from it exact partition
functions, Boltzmann averages, and in-class minimum weights.  Restricted to
n_stab <= 16; the L = 3 code (2^12 = 4096 deformations per class) is the main
use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidParameterError
from .geometry import EQUIV_CLASSES, CodeLayout, EquivalenceClass, PauliFrame, Syndrome
from .matching import decode_enhanced
from .noise import DEPOLARIZING, NoiseModel, beta_bar

ENUMERATION_LIMIT = 16


@dataclass(frozen=True)
class ClassOrbit:
    """Weight histogram of one class's full stabilizer orbit."""

    cls: EquivalenceClass
    representative: PauliFrame
    weight_histogram: dict[int, int]

    @property
    def orbit_size(self) -> int:
        return sum(self.weight_histogram.values())

    @property
    def min_weight(self) -> int:
        return min(w for w, c in self.weight_histogram.items() if c)


def enumerate_orbit(layout: CodeLayout, representative: PauliFrame) -> ClassOrbit:
    """Histogram the weights of representative * S over the whole stabilizer group."""
    m = layout.n_stab
    if m > ENUMERATION_LIMIT:
        raise InvalidParameterError(
            f"orbit enumeration is desk-scale only (n_stab <= {ENUMERATION_LIMIT}, got {m})"
        )
    masks = [s.mask for s in layout.stabilizers]
    x_kind = [s.kind == "X" for s in layout.stabilizers]
    counts = [0] * (layout.n_qubits + 1)
    x, z = representative.x, representative.z
    cur = (x | z).bit_count()
    counts[cur] += 1
    for k in range(1, 1 << m):
        g = (k & -k).bit_length() - 1  # Gray code: flip one generator per step
        mask = masks[g]
        if x_kind[g]:
            nx = x ^ mask
            cur += ((nx | z) & mask).bit_count() - ((x | z) & mask).bit_count()
            x = nx
        else:
            nz = z ^ mask
            cur += ((nz | x) & mask).bit_count() - ((x | z) & mask).bit_count()
            z = nz
        counts[cur] += 1
    histogram = {w: c for w, c in enumerate(counts) if c}
    return ClassOrbit(layout.class_of(representative), representative.copy(), histogram)


def exact_boltzmann(orbit: ClassOrbit, beta: float) -> tuple[float, float]:
    """Exact (log Z_E, <n>_beta) of the orbit at inverse temperature beta.

    Z is relative (a frame-independent constant is dropped throughout), so at
    beta = 0 it equals the orbit size 2^n_stab.
    """
    weights = np.array(sorted(orbit.weight_histogram), dtype=float)
    counts = np.array([orbit.weight_histogram[int(w)] for w in weights], dtype=float)
    log_terms = -beta * weights + np.log(counts)
    log_z = float(logsumexp(log_terms))
    probs = np.exp(log_terms - log_z)
    mean_n = float(np.dot(weights, probs))
    return log_z, mean_n


def class_orbits(
    layout: CodeLayout, syndrome: Syndrome, refine_steps: int = 0
) -> dict[EquivalenceClass, ClassOrbit]:
    """Orbits of all four classes, seeded from the class-forced matcher.

    The histogram is representative-invariant, so the cheap unrefined
    hypotheses are used by default.
    """
    model = NoiseModel.depolarizing(0.1)  # scores irrelevant, any valid rate
    _, chain_set = decode_enhanced(layout, syndrome, model, refine_steps=refine_steps)
    return {
        cls: enumerate_orbit(layout, chain_set.frame_for(cls)) for cls in EQUIV_CLASSES
    }


def exact_class_log_z(
    layout: CodeLayout, syndrome: Syndrome, model: NoiseModel
) -> dict[EquivalenceClass, float]:
    """Exact relative log Z_E(beta_bar) for each class (depolarizing only)."""
    if model.kind != DEPOLARIZING:
        raise InvalidParameterError(
            "the exact oracle is defined for depolarizing noise, where chain "
            f"probability depends on weight alone (got {model.kind!r})"
        )
    bb = beta_bar(model)
    orbits = class_orbits(layout, syndrome)
    return {cls: exact_boltzmann(orbits[cls], bb)[0] for cls in EQUIV_CLASSES}


def exact_class_distribution(
    layout: CodeLayout, syndrome: Syndrome, model: NoiseModel
) -> dict[EquivalenceClass, float]:
    """Exact posterior probability of each class given the syndrome."""
    log_z = exact_class_log_z(layout, syndrome, model)
    shift = max(log_z.values())
    raw = {cls: math.exp(v - shift) for cls, v in log_z.items()}
    total = sum(raw.values())
    return {cls: v / total for cls, v in raw.items()}


def exact_decoder(
    layout: CodeLayout, syndrome: Syndrome, model: NoiseModel
) -> EquivalenceClass:
    """Most probable equivalence class by exhaustive enumeration."""
    log_z = exact_class_log_z(layout, syndrome, model)
    return max(EQUIV_CLASSES, key=lambda c: (log_z[c], -c.index))
