"""Training data construction for the mixed-variable learning problem.

Initial states are sampled (grids, seeded boxes, sine modes), filtered by
energy level and optional half-space restriction, propagated one macro
step with the micro-step midpoint reference, and assembled into mixed
inputs (q0, p_dT) with difference-quotient gradient targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, FilterTooTight, NotOneDOF, TooFewSamples
from .integrators import midpoint_many
from .surrogate import HBDataset
from .systems import HamiltonianSystem, Wave, apply_jt

BOX_CHUNK = 8192
MAX_DRAWS = 10_000_000
MIN_ACCEPT_RATE = 1e-3


@dataclass
class SamplerSpec:
    """How to draw initial states.

    mode is one of 'grid', 'uniform_box', 'reduced_box', 'sine_modes'.
    The energy cap is strict (<) or inclusive (<=) per energy_strict; the
    half-space restriction keeps sign * x[coord] <= 0 and is applied after
    the energy filter.
    """

    mode: str
    bounds: list | None = None            # [(lo, hi)] per state coordinate
    counts: list | None = None            # grid points per axis
    target_count: int | None = None       # accepted states for box modes
    seed: int | None = None
    z_max: float | None = None            # reduced_box half-width
    modes: int | None = None              # sine_modes count B
    energy_cap: float | None = None
    energy_strict: bool = False
    halfspace: tuple | None = None        # (state coord, sign in {-1, +1})

    def __post_init__(self):
        if self.mode not in ("grid", "uniform_box", "reduced_box", "sine_modes"):
            raise ValueError(f"unknown sampler mode {self.mode!r}")


def _apply_filters(sys: HamiltonianSystem, states: np.ndarray, spec: SamplerSpec):
    keep = np.ones(states.shape[0], dtype=bool)
    if spec.energy_cap is not None:
        H = sys.energy_many(states)
        keep &= (H < spec.energy_cap) if spec.energy_strict else (H <= spec.energy_cap)
    if spec.halfspace is not None:
        coord, sign = spec.halfspace
        keep &= sign * states[:, coord] <= 0.0
    return states[keep]


def _box_bounds(sys, spec):
    if spec.mode == "reduced_box":
        if spec.z_max is None:
            raise ValueError("reduced_box sampler needs z_max")
        return [(-spec.z_max, spec.z_max)] * sys.dim
    if spec.bounds is None:
        raise ValueError(f"{spec.mode} sampler needs bounds")
    if len(spec.bounds) != sys.dim:
        raise DimensionMismatch(f"{len(spec.bounds)} bounds for state dim {sys.dim}")
    for lo, hi in spec.bounds:
        if not lo < hi:
            raise ValueError(f"bounds must be well ordered, got ({lo}, {hi})")
    return [tuple(b) for b in spec.bounds]


def sample_states(sys: HamiltonianSystem, spec: SamplerSpec) -> np.ndarray:
    """Deterministic state sample per the spec and seed; (M, 2n) array."""
    if spec.mode == "grid":
        bounds = _box_bounds(sys, spec)
        if spec.counts is None or len(spec.counts) != sys.dim:
            raise ValueError("grid sampler needs one axis count per coordinate")
        axes = [np.linspace(lo, hi, int(c)) for (lo, hi), c in zip(bounds, spec.counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        states = np.stack([m.ravel() for m in mesh], axis=1)
        return _apply_filters(sys, states, spec)

    if spec.mode == "sine_modes":
        if not isinstance(sys, Wave):
            raise DimensionMismatch("sine_modes sampling is defined for the wave system")
        if not spec.modes or spec.modes < 1:
            raise ValueError("sine_modes sampler needs modes >= 1")
        cols = []
        for a in range(1, spec.modes + 1):
            for b in range(1, spec.modes + 1):
                cols.append(np.concatenate([sys.sine_mode(a), sys.sine_mode(b)]))
        return _apply_filters(sys, np.stack(cols), spec)

    # seeded rejection sampling over a box
    bounds = _box_bounds(sys, spec)
    if not spec.target_count or spec.target_count < 1:
        raise ValueError("box sampler needs target_count >= 1")
    rng = np.random.default_rng(spec.seed)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    accepted = []
    n_accepted = 0
    n_drawn = 0
    while n_accepted < spec.target_count:
        chunk = rng.uniform(lo, hi, size=(BOX_CHUNK, sys.dim))
        n_drawn += BOX_CHUNK
        kept = _apply_filters(sys, chunk, spec)
        accepted.append(kept)
        n_accepted += kept.shape[0]
        if n_drawn >= MAX_DRAWS and n_accepted < MIN_ACCEPT_RATE * n_drawn:
            raise FilterTooTight(
                f"acceptance {n_accepted}/{n_drawn} below {MIN_ACCEPT_RATE:.1%}"
            )
    return np.concatenate(accepted)[: spec.target_count]


def build_hb_dataset(sys: HamiltonianSystem, states, delta_t: float,
                     micro_dt: float, meta: dict | None = None) -> HBDataset:
    """Propagate one macro step and assemble mixed inputs and targets.

    Inputs are (q0, p_dT); targets are J'(x_dT - x0) / dT, the discrete
    gradient data of the mixed-variable potential.
    """
    X0 = np.atleast_2d(np.asarray(states, dtype=float))
    if X0.shape[1] != sys.dim:
        raise DimensionMismatch(f"state dim {X0.shape[1]} != {sys.dim}")
    K = int(round(delta_t / micro_dt))
    if K < 1 or abs(K * micro_dt - delta_t) > 1e-9 * max(1.0, delta_t):
        raise ValueError(f"delta_t={delta_t} is not an integer multiple of micro_dt={micro_dt}")
    XT = midpoint_many(sys, X0, micro_dt, K)
    n = sys.n
    xi = np.concatenate([X0[:, :n], XT[:, n:]], axis=1)
    y = apply_jt(XT - X0) / delta_t
    info = {"system": sys.name, "delta_t": float(delta_t), "micro_dt": float(micro_dt),
            "count": int(X0.shape[0])}
    info.update(meta or {})
    return HBDataset(inputs=xi, targets=y, delta_t=float(delta_t), meta=info)


def split_train_validation(data: HBDataset, fraction: float, seed: int):
    """Seeded shuffle split into disjoint, exhaustive train/validation parts."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie strictly between 0 and 1")
    if data.count < 2:
        raise TooFewSamples("need at least 2 samples to split")
    perm = np.random.default_rng(seed).permutation(data.count)
    n_train = min(max(int(fraction * data.count), 1), data.count - 1)
    idx_a, idx_b = perm[:n_train], perm[n_train:]
    make = lambda idx, tag: HBDataset(
        inputs=data.inputs[idx], targets=data.targets[idx], delta_t=data.delta_t,
        meta={**data.meta, "split": tag},
    )
    return make(idx_a, "train"), make(idx_b, "validation")


def separability_diagnostic(data: HBDataset):
    """Scatter tables contrasting separable and mixed-input data views.

    Table A pairs each scalar input with its would-be separable target:
    rows ('q_update', p_dT, dq/dT) and ('p_update', q0, -dp/dT).  Table B
    keys the same targets by the full mixed input.  Returns (table_a,
    table_b) as column dicts; no modeling is performed.
    """
    if data.dim != 2:
        raise NotOneDOF(f"diagnostic is defined for one degree of freedom, dim={data.dim}")
    q0, p_dt = data.inputs[:, 0], data.inputs[:, 1]
    y_q, y_p = data.targets[:, 0], data.targets[:, 1]   # y_q = -dp/dT, y_p = dq/dT
    table_a = {
        "component": ["q_update"] * data.count + ["p_update"] * data.count,
        "input": np.concatenate([p_dt, q0]),
        "output": np.concatenate([y_p, y_q]),
    }
    table_b = {"xi_q": q0, "xi_p": p_dt, "y_q": y_q, "y_p": y_p}
    return table_a, table_b
