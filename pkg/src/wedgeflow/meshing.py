"""Uniform 1D meshes, global DOF numbering, and endpoint Dirichlet constraints."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import HERMITE, ElementFamily

#: Constraint keys are (kind, side) with kind in {"value", "slope"} and side in
#: {0, 1} for the left/right domain endpoint; values are the prescribed data.
VALUE = "value"
SLOPE = "slope"


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of n_elem elements on [0, 1]."""

    n_elem: int
    nodes: np.ndarray

    @property
    def h(self) -> float:
        return 1.0 / self.n_elem


def build_mesh(n_elem: int) -> Mesh1D:
    """Build the uniform mesh with n_elem elements (n_elem + 1 nodes) on [0, 1]."""
    if not isinstance(n_elem, (int, np.integer)) or isinstance(n_elem, bool) or n_elem < 1:
        raise ValueError(f"n_elem must be a positive integer, got {n_elem!r}")
    nodes = np.linspace(0.0, 1.0, n_elem + 1)
    nodes.setflags(write=False)
    return Mesh1D(n_elem, nodes)


@dataclass(frozen=True)
class DofMap:
    """Element-to-global DOF table with constraint bookkeeping.

    Numbering is blocked: nodal DOFs first (node-major; value then slope for
    the Hermite family), element bubbles appended afterwards.  `constraints`
    maps global DOF index to its prescribed value.
    """

    family: ElementFamily
    element_dofs: np.ndarray
    n_global: int
    half_bandwidth: int
    constraints: dict = field(default_factory=dict)

    @property
    def n_elem(self) -> int:
        return self.element_dofs.shape[0]

    def free_mask(self) -> np.ndarray:
        mask = np.ones(self.n_global, dtype=bool)
        for i in self.constraints:
            mask[i] = False
        return mask


def _endpoint_dof(family: ElementFamily, n_elem: int, kind: str, side: int) -> int:
    if side not in (0, 1):
        raise ValueError(f"constraint side must be 0 or 1, got {side!r}")
    if kind not in (VALUE, SLOPE):
        raise ValueError(f"constraint kind must be 'value' or 'slope', got {kind!r}")
    if family.kind == HERMITE:
        base = 0 if side == 0 else 2 * n_elem
        return base + (0 if kind == VALUE else 1)
    if kind == SLOPE:
        raise ValueError("hierarchic elements carry no slope DOFs to constrain")
    return 0 if side == 0 else n_elem


def build_dofmap(mesh: Mesh1D, family: ElementFamily, bcs: dict | None = None) -> DofMap:
    """Number global DOFs for `family` on `mesh` and register endpoint constraints.

    Parameters
    ----------
    mesh : Mesh1D
    family : ElementFamily
    bcs : dict, optional
        Mapping {(kind, side): prescribed_value}; kind in {"value", "slope"},
        side 0 for the left endpoint and 1 for the right.

    Returns
    -------
    DofMap
    """
    n = mesh.n_elem
    p = family.degree
    if family.kind == HERMITE:
        n_bubbles = p - 3
        n_nodal = 2 * (n + 1)
        table = np.empty((n, p + 1), dtype=np.intp)
        for e in range(n):
            table[e, :4] = (2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3)
            for k in range(n_bubbles):
                table[e, 4 + k] = n_nodal + e * n_bubbles + k
    else:
        n_bubbles = p - 1
        n_nodal = n + 1
        table = np.empty((n, p + 1), dtype=np.intp)
        for e in range(n):
            table[e, :2] = (e, e + 1)
            for k in range(n_bubbles):
                table[e, 2 + k] = n_nodal + e * n_bubbles + k
    n_global = n_nodal + n * n_bubbles
    half_bw = int(np.max(table.max(axis=1) - table.min(axis=1)))
    constraints = {}
    for (kind, side), value in (bcs or {}).items():
        idx = _endpoint_dof(family, n, kind, side)
        constraints[idx] = float(value)
    table.setflags(write=False)
    return DofMap(family, table, n_global, half_bw, constraints)


def jh_constraints() -> dict:
    """Boundary conditions of the wedge-flow problem: f(0)=1, f'(0)=0, f(1)=0."""
    return {(VALUE, 0): 1.0, (SLOPE, 0): 0.0, (VALUE, 1): 0.0}


def model_constraints() -> dict:
    """Boundary condition of the first-order model problem: u(0)=1."""
    return {(VALUE, 0): 1.0}
