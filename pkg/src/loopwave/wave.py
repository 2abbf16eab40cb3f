"""Token-driven wave propagation over a directed graph with cycles.

The driver repeatedly sweeps the vertex list; every marked (token-carrying)
vertex is cleared, its ``overture`` hook runs, the ``action`` transfer fires
along each of its edges (re-marking the target whenever the transfer reports
a change), and ``underture`` runs.  The wave stops after a sweep that finds
no tokens.  With monotone transfers over finite-height lattices the driver
reaches the unique fixpoint; a pass ceiling guards against broken hooks.

Forward waves sweep vertices in ascending id order, which follows the
program text; backward waves sweep in descending order so that information
flowing against the edges still crosses the whole graph in one sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence


def _noop(*_args) -> None:
    return None


@dataclass
class WaveHooks:
    """Pluggable behavior of one wave.

    ``action(target, source)`` performs the transfer along one edge and
    returns True when the target's data changed (the target is then
    re-marked).  It must be monotone toward a finite-height lattice top,
    otherwise the wave may never settle.
    """

    action: Callable[[int, int], bool]
    init: Callable[[], None] = _noop
    overture: Callable[[int], None] = _noop
    underture: Callable[[int], None] = _noop
    deinit: Callable[[], None] = _noop


@dataclass
class WaveStats:
    """outer_passes counts sweeps that processed at least one token."""

    outer_passes: int = 0
    edge_firings: int = 0


@dataclass(frozen=True)
class TraceEvent:
    pass_no: int
    vertex: int
    target: int
    changed: bool


class NonTerminationError(RuntimeError):
    """The wave exceeded its pass ceiling; some hook is not monotone."""


def _run(
    nv: int,
    adjacency: Sequence[Sequence[int]],
    hooks: WaveHooks,
    seeds: Sequence[int],
    order: Sequence[int],
    max_passes: int,
    trace: Optional[list],
) -> WaveStats:
    marked = [False] * nv
    for s in seeds:
        marked[s] = True
    stats = WaveStats()
    hooks.init()
    while True:
        found = 0
        for i in order:
            if not marked[i]:
                continue
            found += 1
            marked[i] = False
            hooks.overture(i)
            for j in adjacency[i]:
                changed = hooks.action(j, i)
                stats.edge_firings += 1
                if trace is not None:
                    trace.append(TraceEvent(stats.outer_passes + 1, i, j, changed))
                if changed:
                    marked[j] = True
            hooks.underture(i)
        if not found:
            break
        stats.outer_passes += 1
        if stats.outer_passes > max_passes:
            hooks.deinit()
            raise NonTerminationError(
                f"wave did not settle within {max_passes} passes; "
                "a transfer is probably not monotone"
            )
    hooks.deinit()
    return stats


def run_forward(
    g,
    hooks: WaveHooks,
    seeds: Optional[Sequence[int]] = None,
    *,
    max_passes: int = 64,
    order: Optional[Sequence[int]] = None,
    trace: Optional[list] = None,
) -> WaveStats:
    """Propagate along forward edges; the entry vertex seeds the wave."""
    if seeds is None:
        seeds = [getattr(g, "entry", 0)]
    if order is None:
        order = range(g.nv)
    return _run(g.nv, g.fwd, hooks, seeds, order, max_passes, trace)


def run_backward(
    g,
    hooks: WaveHooks,
    seeds: Optional[Sequence[int]] = None,
    *,
    max_passes: int = 64,
    order: Optional[Sequence[int]] = None,
    trace: Optional[list] = None,
) -> WaveStats:
    """Propagate along reversed edges; the exit vertex seeds the wave."""
    if seeds is None:
        seeds = [getattr(g, "exit", g.nv - 1)]
    if order is None:
        order = range(g.nv - 1, -1, -1)
    return _run(g.nv, g.bwd, hooks, seeds, order, max_passes, trace)
