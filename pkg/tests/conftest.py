"""
Shared fixtures: corpus groupoids and separability data, built instances
and their duals. Everything is session scoped; instances cache their
products and slices, so sharing them keeps the suite fast.
"""

from pathlib import Path

import pytest

from cg_algebra import build_cg
from duality import build_dual
from groupoid import load_groupoid
from kg_algebra import build_kg
from separability import build_sep_dual, build_sep_wmha, load_sep
from wmha_core import CheckSettings

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
GROUPOID_FILES = sorted(p.stem for p in (CORPUS / "groupoids").glob("*.json"))
SEP_FILES = sorted(p.stem for p in (CORPUS / "separability").glob("*.json"))

# dimension-16 instances are sampled
SAMPLED = CheckSettings(max_exhaustive_dim=8, sample_size=25, seed=7)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def groupoids() -> dict:
    return {name: load_groupoid(CORPUS / "groupoids" / f"{name}.json") for name in GROUPOID_FILES}


@pytest.fixture(scope="session")
def sep_data() -> dict:
    return {name: load_sep(CORPUS / "separability" / f"{name}.json") for name in SEP_FILES}


@pytest.fixture(scope="session")
def kg(groupoids) -> dict:
    return {name: build_kg(G) for name, G in groupoids.items()}


@pytest.fixture(scope="session")
def cg(groupoids) -> dict:
    return {name: build_cg(G) for name, G in groupoids.items()}


@pytest.fixture(scope="session")
def dual_of_kg(kg):
    """Lazily built duals of K(G), keyed by corpus name."""
    built = {}

    def get(name):
        if name not in built:
            built[name] = build_dual(kg[name])
        return built[name]
    return get


@pytest.fixture(scope="session")
def sep_wmha(sep_data) -> dict:
    return {name: build_sep_wmha(data) for name, data in sep_data.items()}


@pytest.fixture(scope="session")
def sep_dual(sep_data) -> dict:
    return {name: build_sep_dual(data) for name, data in sep_data.items()}


# --- Corpus-wide parametrization ---

# instances whose law checks run long; they carry the slow marker
COSTLY = ("pair3", "matrix2")


def corpus_refs(kinds=("kg", "cg"), sep=SEP_FILES) -> list:
    """pytest params "kind:name" over the groupoid corpus (and separability data for kind sep)."""
    refs = [f"{kind}:{name}" for kind in kinds for name in GROUPOID_FILES]
    refs += [f"sep:{name}" for name in sep]
    return [pytest.param(ref, marks=pytest.mark.slow) if ref.split(":")[1] in COSTLY else ref for ref in refs]


def settings_for(ref: str) -> CheckSettings:
    return SAMPLED if ref.endswith("matrix2") else CheckSettings()


@pytest.fixture(scope="session")
def instance(kg, cg, sep_wmha):
    """Primal instance by "kind:name"."""
    families = {"kg": kg, "cg": cg, "sep": sep_wmha}

    def get(ref):
        kind, name = ref.split(":")
        return families[kind][name]
    return get


@pytest.fixture(scope="session")
def dual_of(instance):
    """Lazily built generic duals by "kind:name"."""
    built = {}

    def get(ref):
        if ref not in built:
            built[ref] = build_dual(instance(ref))
        return built[ref]
    return get
