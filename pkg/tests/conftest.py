import pytest

from speclab import fuchsian


@pytest.fixture(scope="session")
def group():
    return fuchsian.build_genus2_octagon()


@pytest.fixture(scope="session")
def table10(group):
    return fuchsian.enumerate_primitives(group, 10.0)


@pytest.fixture(scope="session")
def table8(table10):
    return table10.restrict(8.0)


@pytest.fixture(autouse=True)
def _cache_dir(tmp_path_factory, monkeypatch):
    monkeypatch.setenv("SPECLAB_CACHE_DIR", str(tmp_path_factory.getbasetemp() / "cache"))
