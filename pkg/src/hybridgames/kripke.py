"""Finite Kripke models, the recursive truth definition, and brute force.

Worlds are small integer handles into ``Model.worlds`` (a tuple of names).
The assignment has a finite domain: only the nominals a problem mentions.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator, Mapping

import numpy as np

from .syntax import (And, At, Box, Dia, Formula, Imp, Neg, Nom, Or, Prop, Rel,
                     fresh_nominals, nominals_of, props_of)

__all__ = [
    "Model", "ModelError", "UnknownNominalError", "ResourceLimitError",
    "evaluate", "evaluate_global", "truth_set", "enumerate_models", "count_models",
    "surjections", "oracle_valid", "ValidUpToBounds", "CounterexampleModel",
    "DEFAULT_MODEL_CAP",
]

DEFAULT_MODEL_CAP = 5_000_000


class ModelError(ValueError):
    """A model violates one of its invariants."""


class UnknownNominalError(LookupError):
    def __init__(self, nominal: str):
        self.nominal = nominal
        super().__init__(f"nominal {nominal!r} is not assigned in the model")


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Model:
    """``(W, R, V, g)`` with world handles ``0 .. len(worlds)-1``.

    Propositions missing from ``valuation`` are false everywhere.
    """

    worlds: tuple[str, ...]
    access: frozenset[tuple[int, int]]
    valuation: Mapping[str, frozenset[int]]
    assignment: Mapping[str, int]
    successors: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.worlds)
        if n == 0:
            raise ModelError("a model needs at least one world")
        if len(set(self.worlds)) != n:
            raise ModelError("world names must be distinct")
        for a, b in self.access:
            if not (0 <= a < n and 0 <= b < n):
                raise ModelError(f"access pair {(a, b)} refers to an unknown world")
        for p, ws in self.valuation.items():
            if any(not 0 <= w < n for w in ws):
                raise ModelError(f"valuation of {p!r} refers to an unknown world")
        for i, w in self.assignment.items():
            if not 0 <= w < n:
                raise ModelError(f"assignment of {i!r} refers to an unknown world")
        object.__setattr__(self, "access", frozenset(self.access))
        object.__setattr__(self, "valuation",
                           {p: frozenset(ws) for p, ws in self.valuation.items()})
        object.__setattr__(self, "assignment", dict(self.assignment))
        succ = [[] for _ in range(n)]
        for a, b in sorted(self.access):
            succ[a].append(b)
        object.__setattr__(self, "successors", tuple(tuple(s) for s in succ))

    @property
    def named(self) -> bool:
        """Every world has a name (the assignment is surjective)."""
        return set(self.assignment.values()) == set(range(len(self.worlds)))

    def world(self, name: str) -> int:
        try:
            return self.worlds.index(name)
        except ValueError:
            raise ModelError(f"unknown world {name!r}") from None

    def g(self, nominal: str) -> int:
        try:
            return self.assignment[nominal]
        except KeyError:
            raise UnknownNominalError(nominal) from None

    def holds(self, p: str, w: int) -> bool:
        return w in self.valuation.get(p, ())

    def names_of(self, w: int) -> list[str]:
        return sorted(i for i, v in self.assignment.items() if v == w)

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    # ------------------------------------------------------------------
    # construction and persistence

    @classmethod
    def build(cls, worlds: Iterable[str], access: Iterable[tuple[str, str]] = (),
              valuation: Mapping[str, Iterable[str]] | None = None,
              assignment: Mapping[str, str] | None = None) -> "Model":
        """Build a model from world *names*; every reference is validated."""
        worlds = tuple(worlds)
        index = {}
        for k, name in enumerate(worlds):
            if not isinstance(name, str):
                raise ModelError(f"world names must be strings, got {name!r}")
            if name in index:
                raise ModelError(f"duplicate world {name!r}")
            index[name] = k

        def idx(name, what):
            try:
                return index[name]
            except (KeyError, TypeError):
                raise ModelError(f"{what} refers to unknown world {name!r}") from None

        pairs = set()
        for pair in access:
            if len(pair) != 2:
                raise ModelError(f"access entry {pair!r} is not a pair")
            pairs.add((idx(pair[0], "access"), idx(pair[1], "access")))
        val = {p: frozenset(idx(w, f"valuation of {p!r}") for w in ws)
               for p, ws in (valuation or {}).items()}
        asg = {i: idx(w, f"assignment of {i!r}") for i, w in (assignment or {}).items()}
        overlap = set(val) & set(asg)
        if overlap:
            raise ModelError(f"identifiers used both as proposition and nominal: {sorted(overlap)}")
        return cls(worlds, frozenset(pairs), val, asg)

    def to_dict(self) -> dict:
        names = self.worlds
        return {
            "worlds": list(names),
            "access": [[names[a], names[b]] for a, b in sorted(self.access)],
            "valuation": {p: [names[w] for w in sorted(ws)]
                          for p, ws in sorted(self.valuation.items())},
            "assignment": {i: names[w] for i, w in sorted(self.assignment.items())},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Model":
        if not isinstance(data, Mapping):
            raise ModelError("model must be a JSON object")
        unknown = set(data) - {"worlds", "access", "valuation", "assignment"}
        if unknown:
            raise ModelError(f"unknown model keys: {sorted(unknown)}")
        if "worlds" not in data:
            raise ModelError("model is missing 'worlds'")
        if not isinstance(data["worlds"], list):
            raise ModelError("'worlds' must be a list")
        for key, kind in (("access", list), ("valuation", dict), ("assignment", dict)):
            if key in data and not isinstance(data[key], kind):
                raise ModelError(f"{key!r} must be a {'list' if kind is list else 'object'}")
        return cls.build(data["worlds"], data.get("access", []),
                         data.get("valuation", {}), data.get("assignment", {}))

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "Model":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dot(self, name: str = "M") -> str:
        lines = [f"digraph {name} {{"]
        for w, wname in enumerate(self.worlds):
            props = sorted(p for p, ws in self.valuation.items() if w in ws)
            noms = self.names_of(w)
            label = wname
            if noms:
                label += " = g(" + ",".join(noms) + ")"
            if props:
                label += "\\n" + " ".join(props)
            lines.append(f'  "{wname}" [label="{label}"];')
        for a, b in sorted(self.access):
            lines.append(f'  "{self.worlds[a]}" -> "{self.worlds[b]}";')
        lines.append("}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# truth

def evaluate(model: Model, w: int, phi: Formula) -> bool:
    """``model, w |= phi`` by the recursive truth definition."""
    _check_nominals(model, phi)
    if not 0 <= w < len(model.worlds):
        raise ModelError(f"no world with handle {w}")
    return _eval(model, w, phi)


def _eval(model: Model, w: int, phi: Formula) -> bool:
    if isinstance(phi, Prop):
        return model.holds(phi.name, w)
    if isinstance(phi, Nom):
        return model.g(phi.name) == w
    if isinstance(phi, Rel):
        return (model.g(phi.src), model.g(phi.dst)) in model.access
    if isinstance(phi, And):
        return _eval(model, w, phi.left) and _eval(model, w, phi.right)
    if isinstance(phi, Or):
        return _eval(model, w, phi.left) or _eval(model, w, phi.right)
    if isinstance(phi, Imp):
        return not _eval(model, w, phi.left) or _eval(model, w, phi.right)
    if isinstance(phi, Neg):
        return not _eval(model, w, phi.body)
    if isinstance(phi, At):
        return _eval(model, model.g(phi.nominal), phi.body)
    if isinstance(phi, Box):
        return all(_eval(model, v, phi.body) for v in model.successors[w])
    if isinstance(phi, Dia):
        return any(_eval(model, v, phi.body) for v in model.successors[w])
    raise TypeError(f"not a formula: {phi!r}")


def evaluate_global(model: Model, phi: Formula) -> bool:
    """``model |= phi``: true at every world."""
    _check_nominals(model, phi)
    return all(_eval(model, w, phi) for w in range(len(model.worlds)))


def truth_set(model: Model, phi: Formula) -> frozenset[int]:
    _check_nominals(model, phi)
    return frozenset(w for w in range(len(model.worlds)) if _eval(model, w, phi))


def _check_nominals(model: Model, phi: Formula) -> None:
    for i in sorted(nominals_of(phi)):
        model.g(i)


# --------------------------------------------------------------------------
# enumeration

def surjections(n: int, k: int) -> int:
    """Number of surjections from an ``n``-set onto a ``k``-set."""
    return sum((-1) ** j * comb(k, j) * (k - j) ** n for j in range(k + 1))


def count_models(n_worlds_max: int, props: Iterable[str], noms: Iterable[str]) -> int:
    """Size of :func:`enumerate_models` for the same arguments."""
    n_props = len(set(props))
    n_noms = len(set(noms))
    return sum(surjections(n_noms, k) * 2 ** (k * k) * 2 ** (k * n_props)
               for k in range(1, min(n_worlds_max, n_noms) + 1))


def enumerate_models(n_worlds_max: int, props: Iterable[str], noms: Iterable[str],
                     cap: int = DEFAULT_MODEL_CAP) -> Iterator[Model]:
    """Every named model with at most ``n_worlds_max`` worlds over the signature.

    No isomorphism reduction: models differing only by a renaming of worlds
    are yielded separately.  Order is deterministic: world count, then
    assignment, then accessibility relation, then valuation.
    """
    props = sorted(set(props))
    noms = sorted(set(noms))
    if not noms:
        raise ValueError("a named model needs at least one nominal")
    if n_worlds_max < 1:
        raise ValueError("n_worlds_max must be at least 1")
    total = count_models(n_worlds_max, props, noms)
    if total > cap:
        raise ResourceLimitError(f"{total} models exceed the cap of {cap}")
    for k in range(1, min(n_worlds_max, len(noms)) + 1):
        names = tuple(f"w{t + 1}" for t in range(k))
        pairs = [(a, b) for a in range(k) for b in range(k)]
        cells = [(p, w) for p in props for w in range(k)]
        for targets in itertools.product(range(k), repeat=len(noms)):
            if len(set(targets)) != k:
                continue
            assignment = dict(zip(noms, targets))
            for rbits in range(2 ** len(pairs)):
                access = frozenset(pr for t, pr in enumerate(pairs) if rbits >> t & 1)
                for vbits in range(2 ** len(cells)):
                    valuation = {p: frozenset() for p in props}
                    for t, (p, w) in enumerate(cells):
                        if vbits >> t & 1:
                            valuation[p] = valuation[p] | {w}
                    yield Model(names, access, valuation, assignment)


# --------------------------------------------------------------------------
# bounded validity oracle

@dataclass(frozen=True)
class ValidUpToBounds:
    max_worlds: int
    models_checked: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class CounterexampleModel:
    model: Model
    world: int

    def __bool__(self):
        return False


def oracle_valid(phi: Formula, max_worlds: int = 3, cap: int = DEFAULT_MODEL_CAP
                 ) -> ValidUpToBounds | CounterexampleModel:
    """Search named models of up to ``max_worlds`` worlds for one falsifying ``phi``.

    Worlds that none of ``phi``'s nominals name receive fresh names, so each
    candidate is a named model; this covers every model of that size up to
    the (irrelevant) naming of the extra worlds.  Evaluation is vectorised
    over all accessibility relations and valuations of a given assignment.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    noms = sorted(nominals_of(phi))
    props = sorted(props_of(phi))
    total = sum(k ** len(noms) * 2 ** (k * k) * 2 ** (k * len(props))
                for k in range(1, max_worlds + 1))
    if total > cap:
        raise ResourceLimitError(f"{total} models exceed the cap of {cap}")
    checked = 0
    spare = fresh_nominals(noms, max_worlds)
    for k in range(1, max_worlds + 1):
        pairs = [(a, b) for a in range(k) for b in range(k)]
        r_all = _bit_table(len(pairs)).reshape(-1, k, k)
        v_all = _bit_table(k * len(props)).reshape(2 ** (k * len(props)), len(props), k)
        for targets in itertools.product(range(k), repeat=len(noms)):
            g = dict(zip(noms, targets))
            table = _VectorEval(r_all, v_all, {p: n for n, p in enumerate(props)}, g, k)
            truth = np.broadcast_to(table.truth(phi), (len(r_all), len(v_all), k))
            checked += len(r_all) * len(v_all)
            bad = np.argwhere(~truth)
            if len(bad):
                r, v, w = (int(x) for x in bad[0])
                return CounterexampleModel(
                    _decode(k, pairs, r, props, v_all[v], g, spare), w)
    return ValidUpToBounds(max_worlds, checked)


def _bit_table(nbits: int) -> np.ndarray:
    """Row ``r`` holds the bits of ``r`` (least significant first)."""
    codes = np.arange(2 ** nbits, dtype=np.int64)[:, None]
    return (codes >> np.arange(nbits, dtype=np.int64)[None, :]) & 1 == 1


def _decode(k, pairs, rbits, props, vrow, g, spare) -> Model:
    names = tuple(f"w{t + 1}" for t in range(k))
    access = frozenset(pr for t, pr in enumerate(pairs) if rbits >> t & 1)
    valuation = {p: frozenset(w for w in range(k) if vrow[n, w]) for n, p in enumerate(props)}
    assignment = dict(g)
    unnamed = [w for w in range(k) if w not in set(g.values())]
    for name, w in zip(spare, unnamed):
        assignment[name] = w
    return Model(names, access, valuation, assignment)


class _VectorEval:
    """Truth arrays of shape (relations, valuations, worlds), broadcast lazily."""

    def __init__(self, r_all, v_all, prop_index, g, k):
        self.r4 = r_all[:, None, :, :]
        self.r_all = r_all
        self.v_all = v_all
        self.prop_index = prop_index
        self.g = g
        self.k = k
        self.memo: dict[Formula, np.ndarray] = {}

    def truth(self, phi: Formula) -> np.ndarray:
        out = self.memo.get(phi)
        if out is None:
            out = self.memo[phi] = self._truth(phi)
        return out

    def _truth(self, phi: Formula) -> np.ndarray:
        if isinstance(phi, Prop):
            return self.v_all[None, :, self.prop_index[phi.name], :]
        if isinstance(phi, Nom):
            row = np.zeros(self.k, dtype=bool)
            row[self.g[phi.name]] = True
            return row[None, None, :]
        if isinstance(phi, Rel):
            col = self.r_all[:, self.g[phi.src], self.g[phi.dst]]
            return col[:, None, None]
        if isinstance(phi, And):
            return self.truth(phi.left) & self.truth(phi.right)
        if isinstance(phi, Or):
            return self.truth(phi.left) | self.truth(phi.right)
        if isinstance(phi, Imp):
            return ~self.truth(phi.left) | self.truth(phi.right)
        if isinstance(phi, Neg):
            return ~self.truth(phi.body)
        if isinstance(phi, At):
            body = self.truth(phi.body)
            # constant-in-world arrays have a last axis of length 1
            w = self.g[phi.nominal] if body.shape[-1] > 1 else 0
            return body[..., w][..., None]
        body = self.truth(phi.body)[..., None, :]
        if isinstance(phi, Box):
            return np.all(~self.r4 | body, axis=-1)
        if isinstance(phi, Dia):
            return np.any(self.r4 & body, axis=-1)
        raise TypeError(f"not a formula: {phi!r}")
