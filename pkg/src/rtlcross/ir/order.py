"""Topological ordering of combinational processes.

A combinational process depends on every process that drives one of the
nets it reads before assigning. The order is deterministic: among ready
processes, source order wins.
"""

from __future__ import annotations

from rtlcross.ir.nodes import ProcIR


class CycleError(Exception):
    def __init__(self, nets: list[str]):
        text = ", ".join(f"'{n}'" for n in nets)
        super().__init__(f"combinational loop through {text}")
        self.message = f"combinational loop through {text}"
        self.nets = nets
        self.line = 0
        self.col = 0


def order_comb(procs: list[ProcIR], comb_idx: list[int]) -> list[int]:
    # Readers must run after every driver of a net, including all the
    # partial continuous drivers of a sliced net.
    drivers: dict[str, list[int]] = {}
    for i in comb_idx:
        for name in procs[i].targets:
            drivers.setdefault(name, []).append(i)

    deps: dict[int, set[int]] = {i: set() for i in comb_idx}
    for i in comb_idx:
        for name in procs[i].ext_reads:
            for j in drivers.get(name, []):
                if j != i:
                    deps[i].add(j)

    indegree = {i: len(deps[i]) for i in comb_idx}
    dependents: dict[int, list[int]] = {i: [] for i in comb_idx}
    for i in comb_idx:
        for j in deps[i]:
            dependents[j].append(i)

    ready = sorted(i for i in comb_idx if indegree[i] == 0)
    order: list[int] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        changed = False
        for k in dependents[node]:
            indegree[k] -= 1
            if indegree[k] == 0:
                ready.append(k)
                changed = True
        if changed:
            ready.sort()

    if len(order) != len(comb_idx):
        stuck = [i for i in comb_idx if i not in order]
        nets: list[str] = []
        for i in stuck:
            for name in procs[i].targets:
                if name not in nets:
                    nets.append(name)
        raise CycleError(nets)
    return order
