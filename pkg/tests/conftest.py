from pathlib import Path

import pytest

from configuracao import CONFIG
from espacos_modelo import criar_hiperbolico
from submersao import submersao_produto

DIRETORIO_CENARIOS = Path(__file__).resolve().parent.parent / "cenarios"


@pytest.fixture(autouse=True)
def silencioso():
    CONFIG.VERBOSE = False
    yield
    CONFIG.VERBOSE = False


@pytest.fixture
def h2():
    return criar_hiperbolico(2)


@pytest.fixture
def h3():
    return criar_hiperbolico(3)


@pytest.fixture
def produto_h2_r(h2):
    return submersao_produto(h2, 1)


@pytest.fixture
def cenarios():
    return DIRETORIO_CENARIOS
