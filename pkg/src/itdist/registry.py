"""Packaged example algebras and the metadata attached to them."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from .algebra import BasedAlgebra, build_based_algebra
from .presentation import load_presentation

FIXTURE_DIR = Path(__file__).with_name("fixtures")

# Literature facts that cannot be derived internally, and recorded reference values.
FIXTURE_META = {
    "z4": {"external_assertions": ["not-syzygy-finite"], "reference": "IT.dist(A) = 1"},
    "ext1": {"reference": "IT.dist(A) = 0"},
    "ext2": {"reference": "IT.dist(A) = 1"},
    "ext3": {"reference": "IT.dist(A) = 2"},
}


def fixture_names() -> list[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.alg"))


def resolve_path(spec: str) -> Path:
    """A file path, or 'fixtures/<name>[.alg]' / '<name>' naming a packaged fixture."""
    p = Path(spec)
    if p.is_file():
        return p
    stem = p.name[:-4] if p.name.endswith(".alg") else p.name
    cand = FIXTURE_DIR / f"{stem}.alg"
    if (p.parent.name in ("fixtures", "") or str(p.parent) == ".") and cand.is_file():
        return cand
    raise FileNotFoundError(f"no presentation file or fixture named {spec!r}")


@lru_cache(maxsize=64)
def _load_cached(path: str, composition, p) -> BasedAlgebra:
    kw = {}
    if composition is not None:
        kw["composition"] = composition
    if p is not None:
        kw["p"] = p
    return build_based_algebra(load_presentation(path, **kw))


def load_algebra(spec: str, composition: str | None = None, p: int | None = None) -> BasedAlgebra:
    return _load_cached(str(resolve_path(spec)), composition, p)


def fixture(name: str) -> BasedAlgebra:
    return load_algebra(name)


def meta(name_or_algebra) -> dict:
    name = name_or_algebra if isinstance(name_or_algebra, str) else name_or_algebra.name
    return FIXTURE_META.get(name, {})
