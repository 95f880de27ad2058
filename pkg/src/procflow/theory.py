"""Process-theory signatures: atomic types, generator boxes and box variants."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import TheoryError, UnknownGeneratorError

TypeList = tuple[str, ...]

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.'\-]*$")


def _check_ident(name: str, what: str) -> None:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise TheoryError(f"invalid {what} name {name!r}")


@dataclass(frozen=True)
class Generator:
    """A generator box ``name: dom -> cod``."""

    name: str
    dom: TypeList = ()
    cod: TypeList = ()

    def __post_init__(self):
        object.__setattr__(self, "dom", tuple(self.dom))
        object.__setattr__(self, "cod", tuple(self.cod))

    def __str__(self):
        return f"{self.name}: {' ⊗ '.join(self.dom) or 'I'} -> {' ⊗ '.join(self.cod) or 'I'}"


@dataclass(frozen=True, order=True)
class BoxVariant:
    """Which member of the quartet {f, f†, f̄, fᵀ} a box occurrence is.

    The adjoint swaps dom and cod keeping wire order; the conjugate keeps
    dom and cod but reverses the order on each side.  Both together give
    the transpose.
    """

    adjoint: bool = False
    conjugate: bool = False

    @property
    def name(self) -> str:
        return _VARIANT_NAMES[(self.adjoint, self.conjugate)]

    @classmethod
    def parse(cls, name: str) -> BoxVariant:
        for key, value in _VARIANT_NAMES.items():
            if value == name:
                return cls(*key)
        raise ValueError(f"unknown box variant {name!r}")

    def toggled(self, adjoint: bool = False, conjugate: bool = False) -> BoxVariant:
        return BoxVariant(self.adjoint ^ adjoint, self.conjugate ^ conjugate)

    @property
    def daggered(self) -> bool:
        """True for f† and f̄, i.e. the boxes drawn as reflections of f."""
        return self.adjoint ^ self.conjugate

    @property
    def rotated(self) -> bool:
        """True for fᵀ and f̄, which are f and f† turned by 180 degrees."""
        return self.conjugate

    def effective(self, gen: Generator) -> tuple[TypeList, TypeList]:
        dom, cod = (gen.cod, gen.dom) if self.adjoint else (gen.dom, gen.cod)
        if self.conjugate:
            dom, cod = dom[::-1], cod[::-1]
        return dom, cod

    def __str__(self):
        return self.name


_VARIANT_NAMES = {
    (False, False): "original",
    (True, False): "adjoint",
    (False, True): "conjugate",
    (True, True): "transpose",
}

ORIGINAL = BoxVariant()
ADJOINT = BoxVariant(adjoint=True)
CONJUGATE = BoxVariant(conjugate=True)
TRANSPOSE = BoxVariant(adjoint=True, conjugate=True)
VARIANTS = (ORIGINAL, ADJOINT, CONJUGATE, TRANSPOSE)


@dataclass(frozen=True)
class Theory:
    """Atomic wire types plus generator boxes over them.

    >>> T = Theory.build(["A", "B"], {"f": (["A"], ["B"])})
    >>> T.generator("f").cod
    ('B',)
    """

    types: TypeList
    generators: tuple[Generator, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(set(self.types)) != len(self.types):
            raise TheoryError("atomic type names must be unique")
        for t in self.types:
            _check_ident(t, "type")
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise TheoryError("generator names must be unique")
        known = set(self.types)
        for g in self.generators:
            _check_ident(g.name, "generator")
            for t in g.dom + g.cod:
                if t not in known:
                    raise TheoryError(f"generator {g.name!r} uses undeclared type {t!r}")

    @classmethod
    def build(cls, types: Iterable[str],
              generators: Mapping[str, tuple[Sequence[str], Sequence[str]]] = ()) -> Theory:
        gens = [Generator(n, tuple(d), tuple(c)) for n, (d, c) in dict(generators).items()]
        return cls(tuple(types), tuple(gens))

    @cached_property
    def _by_name(self) -> dict[str, Generator]:
        return {g.name: g for g in self.generators}

    def generator(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownGeneratorError(f"no generator named {name!r}") from None

    def has_type(self, t: str) -> bool:
        return t in self.types

    def check_types(self, types: Iterable[str]) -> TypeList:
        types = tuple(types)
        for t in types:
            if t not in self.types:
                raise TheoryError(f"type {t!r} is not declared in the theory")
        return types

    def extend(self, types: Iterable[str] = (), generators: Iterable[Generator] = ()) -> Theory:
        new_types = self.types + tuple(t for t in types if t not in self.types)
        return Theory(new_types, self.generators + tuple(generators))
