"""
Backend-neutral linear model.

Builders write rows into an AbstractModel; backends translate it into their
own model objects. Rows carry a `block` (dual symbol) and a `key` so the
dualizer and the result readers can address them without name parsing.
"""

import hashlib
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, Iterator, List, Mapping, Optional

from ..exceptions import ModelBuildError

INF = math.inf

_UNSAFE_NAME = re.compile(r"[^A-Za-z0-9_.]")


class VarKind(str, Enum):
    CONTINUOUS = "C"
    BINARY = "B"


class Sense(str, Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class ObjectiveSense(str, Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


@dataclass(slots=True)
class Variable:
    index: int
    name: str
    lb: float = 0.0
    ub: float = INF
    kind: VarKind = VarKind.CONTINUOUS
    key: Optional[Hashable] = None
    family: Optional[str] = None


@dataclass(slots=True)
class Constraint:
    index: int
    name: str
    coeffs: Dict[int, float]
    sense: Sense
    rhs: float
    block: Optional[str] = None
    key: Optional[Hashable] = None


@dataclass
class AbstractModel:
    name: str
    sense: ObjectiveSense = ObjectiveSense.MINIMIZE
    variables: List[Variable] = field(default_factory=list)
    constraints: List[Constraint] = field(default_factory=list)
    objective: Dict[int, float] = field(default_factory=dict)
    objective_constant: float = 0.0
    _names: Dict[str, int] = field(default_factory=dict, repr=False)

    # ---- variables ----

    def add_var(
        self,
        name: str,
        lb: float = 0.0,
        ub: float = INF,
        kind: VarKind = VarKind.CONTINUOUS,
        key: Optional[Hashable] = None,
        family: Optional[str] = None,
    ) -> int:
        if name in self._names:
            raise ModelBuildError(f"duplicate variable name {name!r} in model {self.name!r}")
        if kind == VarKind.BINARY:
            lb, ub = max(lb, 0.0), min(ub, 1.0)
        if lb > ub:
            raise ModelBuildError(f"variable {name!r} has empty domain [{lb}, {ub}]")
        idx = len(self.variables)
        self.variables.append(Variable(idx, name, lb, ub, kind, key, family))
        self._names[name] = idx
        return idx

    def var_index(self, name: str) -> int:
        return self._names[name]

    def fix(self, idx: int, value: float) -> None:
        var = self.variables[idx]
        var.lb = var.ub = value

    def vars_of(self, family: str) -> Iterator[Variable]:
        return (v for v in self.variables if v.family == family)

    # ---- rows ----

    def add_constr(
        self,
        coeffs: Mapping[int, float],
        sense: Sense,
        rhs: float,
        name: str,
        block: Optional[str] = None,
        key: Optional[Hashable] = None,
    ) -> Optional[int]:
        """Add a row; rows without non-zero coefficients are checked and dropped."""
        clean = {j: float(a) for j, a in coeffs.items() if a != 0.0}
        for j, a in clean.items():
            if not math.isfinite(a):
                raise ModelBuildError(f"non-finite coefficient on {self.variables[j].name!r} in row {name!r}")
        if not math.isfinite(rhs):
            raise ModelBuildError(f"non-finite right-hand side in row {name!r}")
        if not clean:
            ok = {
                Sense.LE: 0.0 <= rhs,
                Sense.GE: 0.0 >= rhs,
                Sense.EQ: rhs == 0.0,
            }[sense]
            if not ok:
                raise ModelBuildError(f"empty row {name!r} is infeasible (0 {sense.value} {rhs})")
            return None
        idx = len(self.constraints)
        self.constraints.append(Constraint(idx, name, clean, sense, float(rhs), block, key))
        return idx

    def rows_of(self, block: str) -> Iterator[Constraint]:
        return (c for c in self.constraints if c.block == block)

    # ---- objective ----

    def set_objective(
        self,
        coeffs: Mapping[int, float],
        constant: float = 0.0,
        sense: Optional[ObjectiveSense] = None,
    ) -> None:
        self.objective = {j: float(c) for j, c in coeffs.items() if c != 0.0}
        self.objective_constant = float(constant)
        if sense is not None:
            self.sense = sense

    def add_objective_term(self, idx: int, coef: float) -> None:
        value = self.objective.get(idx, 0.0) + coef
        if value == 0.0:
            self.objective.pop(idx, None)
        else:
            self.objective[idx] = value

    # ---- inspection ----

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_constrs(self) -> int:
        return len(self.constraints)

    @property
    def is_mip(self) -> bool:
        return any(v.kind == VarKind.BINARY for v in self.variables)

    def evaluate(self, values: List[float]) -> float:
        return self.objective_constant + sum(c * values[j] for j, c in self.objective.items())

    def max_violation(self, values: List[float]) -> float:
        """Largest row or bound violation of a point; 0 for a feasible point."""
        worst = 0.0
        for v in self.variables:
            x = values[v.index]
            worst = max(worst, v.lb - x, x - v.ub)
        for c in self.constraints:
            lhs = sum(a * values[j] for j, a in c.coeffs.items())
            if c.sense == Sense.LE:
                worst = max(worst, lhs - c.rhs)
            elif c.sense == Sense.GE:
                worst = max(worst, c.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - c.rhs))
        return worst

    def backend_name(self, idx: int, row: bool = False) -> str:
        """LP-file-safe name used by backends."""
        raw = self.constraints[idx].name if row else self.variables[idx].name
        prefix = "r" if row else "v"
        return f"{prefix}{idx}_{_UNSAFE_NAME.sub('_', raw)}"[:240]

    def canonical_text(self) -> str:
        """Deterministic text rendering; equal for identically built models."""
        lines = [f"model {self.name}", f"sense {self.sense.value}"]
        obj = " ".join(f"{c:+.17g}*{self.variables[j].name}" for j, c in sorted(self.objective.items()))
        lines.append(f"obj {obj} {self.objective_constant:+.17g}")
        for v in self.variables:
            lines.append(f"var {v.name} {v.kind.value} [{v.lb:.17g},{v.ub:.17g}]")
        for c in self.constraints:
            lhs = " ".join(f"{a:+.17g}*{self.variables[j].name}" for j, a in sorted(c.coeffs.items()))
            lines.append(f"row {c.name}: {lhs} {c.sense.value} {c.rhs:.17g}")
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()
