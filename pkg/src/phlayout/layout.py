"""Iterative force simulation: Barnes-Hut repulsion, edge springs, centering,
plus barcode-driven contraction springs and cross-subset repulsion."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .barcode import Bar, Barcode, bar_metadata
from .forces import repulsion_raw, resolve_coincident
from .graph import Graph


class LayoutNumericsError(RuntimeError):
    """A position or velocity became non-finite."""


@dataclass(frozen=True)
class ForceConfig:
    repulsion_strength: float = 2000.0
    spring_stiffness: float = 0.05
    spring_rest_length: float = 30.0
    centering_strength: float = 0.005
    contraction_stiffness_multiplier: float = 20.0
    ph_repulsion_strength: float = 20000.0
    barnes_hut_theta: float = 0.7
    time_step: float = 1.0
    velocity_damping: float = 0.85
    max_displacement: float = 10.0

    def __post_init__(self):
        positive = (
            "repulsion_strength",
            "spring_stiffness",
            "spring_rest_length",
            "centering_strength",
            "contraction_stiffness_multiplier",
            "ph_repulsion_strength",
            "time_step",
            "max_displacement",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.velocity_damping < 1.0:
            raise ValueError("velocity_damping must be in (0, 1)")
        if not 0.0 <= self.barnes_hut_theta <= 1.0:
            raise ValueError("barnes_hut_theta must be in [0, 1]")

    def replace(self, **changes) -> "ForceConfig":
        return replace(self, **changes)

    def to_file_text(self) -> str:
        lines = [f"{name}={getattr(self, name)}" for name in self.__dataclass_fields__]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_file_text(cls, text: str) -> "ForceConfig":
        values: dict[str, float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in cls.__dataclass_fields__:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            values[key] = float(value.strip())
        return cls(**values)


@dataclass(frozen=True)
class Selection:
    """The user's barcode choices driving extra forces."""

    contraction_threshold: float = 0.0
    repulsed_bars: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.contraction_threshold < 0:
            raise ValueError("contraction_threshold must be >= 0")
        object.__setattr__(self, "repulsed_bars", frozenset(self.repulsed_bars))

    def toggled(self, bar_id: int) -> "Selection":
        repulsed = set(self.repulsed_bars)
        repulsed.symmetric_difference_update({bar_id})
        return Selection(self.contraction_threshold, frozenset(repulsed))

    @property
    def active(self) -> bool:
        return self.contraction_threshold > 0 or bool(self.repulsed_bars)


@dataclass(frozen=True)
class ForceTally:
    """What one step computed; selection changes must show up only here."""

    repulsion_tree_passes: int = 0
    edge_spring_terms: int = 0
    contraction_spring_terms: int = 0
    centering_applied: bool = False


@dataclass
class LayoutState:
    positions: np.ndarray  # (n, 2) display units, node order = graph node order
    velocities: np.ndarray
    iteration: int
    rng_seed: int
    tally: ForceTally | None = field(default=None, compare=False, repr=False)


def init_layout(g: Graph, seed: int) -> LayoutState:
    """Positions uniform on a disc of radius sqrt(|V|), zero velocities."""
    n = len(g.nodes)
    rng = np.random.default_rng(seed)
    radius = np.sqrt(n) * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    positions = np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))
    return LayoutState(
        positions=positions,
        velocities=np.zeros((n, 2)),
        iteration=0,
        rng_seed=seed,
    )


def _spring_accumulate(
    pos: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    rest: np.ndarray | float,
    stiffness: np.ndarray | float,
    out: np.ndarray,
) -> None:
    """Hooke springs between pos[u] and pos[v]; adds forces into out."""
    if len(u) == 0:
        return
    delta = pos[u] - pos[v]
    dist = np.hypot(delta[:, 0], delta[:, 1])
    safe = np.where(dist > 0, dist, 1.0)
    scale = np.where(dist > 0, -stiffness * (dist - rest) / safe, 0.0)
    f = delta * scale[:, None]
    n = out.shape[0]
    out[:, 0] += np.bincount(u, weights=f[:, 0], minlength=n)
    out[:, 1] += np.bincount(u, weights=f[:, 1], minlength=n)
    out[:, 0] -= np.bincount(v, weights=f[:, 0], minlength=n)
    out[:, 1] -= np.bincount(v, weights=f[:, 1], minlength=n)


def _contracted_bars(barcode: Barcode | None, selection: Selection | None) -> list[Bar]:
    if barcode is None or selection is None or selection.contraction_threshold <= 0:
        return []
    limit = selection.contraction_threshold
    return [bar for bar in barcode.bars if bar.persistence_measure < limit]


def _subset_indices(barcode: Barcode, bar_id: int) -> tuple[np.ndarray, np.ndarray]:
    cache = getattr(barcode, "_subset_index_cache", None)
    if cache is None:
        cache = {}
        barcode._subset_index_cache = cache
    if bar_id not in cache:
        bar = bar_metadata(barcode, bar_id)
        g = barcode.wg.graph
        idx_u = np.fromiter(
            sorted(g.node_index(i) for i in bar.subset_u), dtype=np.intp
        )
        idx_v = np.fromiter(
            sorted(g.node_index(i) for i in bar.subset_v), dtype=np.intp
        )
        cache[bar_id] = (idx_u, idx_v)
    return cache[bar_id]


def force_components(
    state: LayoutState,
    g: Graph,
    barcode: Barcode | None = None,
    selection: Selection | None = None,
    config: ForceConfig = ForceConfig(),
    rest_lengths: np.ndarray | None = None,
) -> tuple[dict[str, np.ndarray], ForceTally]:
    """Per-kind force arrays for one step, before integration.

    Exposed separately from step() so tests can check Newton's-third-law
    cancellation and the per-selection force tally.
    """
    n = len(g.nodes)
    pos = resolve_coincident(
        state.positions, np.random.default_rng([state.rng_seed, state.iteration])
    )
    theta = config.barnes_hut_theta

    repulsion = config.repulsion_strength * repulsion_raw(pos, pos, theta)
    tree_passes = 1

    springs = np.zeros((n, 2))
    u, v = g.edge_index_arrays()
    rest = rest_lengths if rest_lengths is not None else config.spring_rest_length
    _spring_accumulate(pos, u, v, rest, config.spring_stiffness, springs)

    centering = -config.centering_strength * pos

    contraction = np.zeros((n, 2))
    contracted = _contracted_bars(barcode, selection)
    if contracted:
        cu = np.fromiter(
            (g.node_index(bar.cause_u) for bar in contracted), dtype=np.intp
        )
        cv = np.fromiter(
            (g.node_index(bar.cause_v) for bar in contracted), dtype=np.intp
        )
        stiffness = config.contraction_stiffness_multiplier * config.spring_stiffness
        _spring_accumulate(pos, cu, cv, 0.0, stiffness, contraction)

    ph_repulsion = np.zeros((n, 2))
    if barcode is not None and selection is not None and selection.repulsed_bars:
        for bar_id in sorted(selection.repulsed_bars):
            idx_u, idx_v = _subset_indices(barcode, bar_id)
            ph_repulsion[idx_v] += config.ph_repulsion_strength * repulsion_raw(
                pos[idx_u], pos[idx_v], theta
            )
            ph_repulsion[idx_u] += config.ph_repulsion_strength * repulsion_raw(
                pos[idx_v], pos[idx_u], theta
            )
            tree_passes += 2

    tally = ForceTally(
        repulsion_tree_passes=tree_passes,
        edge_spring_terms=len(g.edges),
        contraction_spring_terms=len(contracted),
        centering_applied=True,
    )
    components = {
        "repulsion": repulsion,
        "springs": springs,
        "centering": centering,
        "contraction": contraction,
        "ph_repulsion": ph_repulsion,
    }
    return components, tally


def step(
    state: LayoutState,
    g: Graph,
    barcode: Barcode | None = None,
    selection: Selection | None = None,
    config: ForceConfig = ForceConfig(),
    rest_lengths: np.ndarray | None = None,
) -> LayoutState:
    """One damped explicit-Euler iteration; displacement capped per node."""
    bad = ~np.isfinite(state.positions).all(axis=1)
    if np.any(bad):
        node_id = g.nodes[int(np.nonzero(bad)[0][0])].id
        raise LayoutNumericsError(
            f"non-finite position for node {node_id!r} at iteration {state.iteration}"
        )
    components, tally = force_components(
        state, g, barcode, selection, config, rest_lengths
    )
    total = sum(components.values(), start=np.zeros_like(state.positions))

    dt = config.time_step
    velocities = (state.velocities + dt * total) * config.velocity_damping
    speed = np.hypot(velocities[:, 0], velocities[:, 1]) * dt
    over = speed > config.max_displacement
    if np.any(over):
        velocities[over] *= (config.max_displacement / speed[over])[:, None]
    positions = state.positions + velocities * dt

    bad = ~np.isfinite(positions).all(axis=1)
    if np.any(bad):
        node_id = g.nodes[int(np.nonzero(bad)[0][0])].id
        raise LayoutNumericsError(
            f"non-finite position for node {node_id!r} at iteration {state.iteration + 1}"
        )
    return LayoutState(
        positions=positions,
        velocities=velocities,
        iteration=state.iteration + 1,
        rng_seed=state.rng_seed,
        tally=tally,
    )


def run(
    state: LayoutState,
    g: Graph,
    barcode: Barcode | None = None,
    selection: Selection | None = None,
    config: ForceConfig = ForceConfig(),
    n_iterations: int = 0,
    rest_lengths: np.ndarray | None = None,
) -> LayoutState:
    """n applications of step; n = 0 returns the state unchanged."""
    if n_iterations < 0:
        raise ValueError("n_iterations must be >= 0")
    for _ in range(n_iterations):
        state = step(state, g, barcode, selection, config, rest_lengths)
    return state


def kinetic_energy(state: LayoutState) -> float:
    return float(np.sum(state.velocities**2))
