import numpy as np
import pytest
import torch

from erros import ConjuntoAmostralVazio, FronteiraDominio, MetricaNaoPositivaDefinida
from geometria import (
    CampoEscalar,
    carta_esfera,
    carta_euclidiana,
    christoffel,
    christoffel_fd,
    colchete,
    curvatura_seccional,
    gradiente,
    hessiana,
    hessiana_fd,
    laplaciano,
    laplaciano_divergencia,
    norma_bilinear,
    norma_inf,
    norma_sup,
    residuo_compatibilidade,
    validar_metrica,
)


def test_christoffel_concorda_com_diferencas_centrais(h3):
    for p in h3.metrica.amostrar(10, 3):
        gamma = christoffel(h3.metrica, p)
        assert np.max(np.abs(gamma - christoffel_fd(h3.metrica, p))) < 1e-6 * max(1.0, np.abs(gamma).max())


def test_christoffel_hiperbolico_forma_fechada(h2):
    # g = e^{−2s}dx² + ds²: Γ^x_{xs} = −1, Γ^s_{xx} = e^{−2s}
    p = np.array([0.3, 0.7])
    gamma = christoffel(h2.metrica, p)
    assert gamma[0, 0, 1] == pytest.approx(-1.0, abs=1e-12)
    assert gamma[1, 0, 0] == pytest.approx(np.exp(-1.4), abs=1e-12)


def test_compatibilidade_metrica(h3):
    assert residuo_compatibilidade(h3.metrica, np.array([0.2, -0.4, 0.5])) < 1e-10


def test_hessiana_autodiff_contra_oraculo(h3):
    campo = CampoEscalar(h3.metrica, lambda x: torch.sin(x[0]) * x[2] + x[1] ** 2)
    p = np.array([0.1, 0.2, 0.3])
    assert np.allclose(hessiana(campo, p).componentes, hessiana_fd(campo, p), atol=1e-6)


def test_laplaciano_traco_igual_divergencia(h2):
    campo = CampoEscalar(h2.metrica, lambda x: torch.exp(0.3 * x[1]) * torch.cos(x[0]))
    p = np.array([0.4, -0.2])
    assert laplaciano(campo, p) == pytest.approx(laplaciano_divergencia(campo, p), abs=1e-10)


def test_busemann_gradiente_unitario(h2):
    campo = h2.busemann.campo
    for p in h2.metrica.amostrar(5, 11):
        assert gradiente(campo, p).norma(h2.metrica) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("raio", [1.0, 2.0])
def test_curvatura_seccional_esfera(raio):
    esfera = carta_esfera(raio)
    K = curvatura_seccional(esfera, np.array([1.0, 0.5]), [1.0, 0.0], [0.0, 1.0])
    assert K == pytest.approx(1.0 / raio ** 2, rel=1e-10)


def test_curvatura_seccional_hiperbolica(h3):
    K = curvatura_seccional(h3.metrica, np.array([0.1, 0.2, 0.3]), [1.0, 0.5, 0.0], [0.0, 1.0, 2.0])
    assert K == pytest.approx(-1.0, abs=1e-10)


def test_colchete_de_campos_coordenados_se_anula():
    carta = carta_euclidiana(2)
    X = lambda x: torch.stack([x[1], torch.zeros_like(x[0])])
    Y = lambda x: torch.stack([torch.zeros_like(x[0]), torch.ones_like(x[0])])
    # [y∂x, ∂y] = −∂x
    assert np.allclose(colchete(X, Y, np.array([0.3, 0.4])), [-1.0, 0.0], atol=1e-12)


def test_norma_bilinear_diagonal():
    B = np.zeros((2, 2, 1))
    B[0, 0, 0], B[1, 1, 0] = 3.0, 1.0
    assert norma_bilinear(B) == pytest.approx(3.0, rel=1e-8)


def test_norma_bilinear_antissimetrica():
    B = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        B[i, j, k], B[j, i, k] = 1.0, -1.0
    # produto vetorial: sup = 1 em pares ortogonais
    assert norma_bilinear(B) == pytest.approx(1.0, rel=1e-6)


def test_norma_bilinear_vazia():
    assert norma_bilinear(np.zeros((0, 0, 3))) == 0.0


def test_norma_sup_e_inf():
    pontos = [np.array([x]) for x in (-1.0, 0.5, 2.0)]
    assert norma_sup(lambda q: q[0] ** 2, pontos).valor == pytest.approx(4.0)
    assert norma_inf(lambda q: q[0] ** 2, pontos).ponto[0] == pytest.approx(0.5)
    with pytest.raises(ConjuntoAmostralVazio):
        norma_sup(lambda q: 0.0, [])


def test_metrica_nao_positiva_rejeitada():
    with pytest.raises(MetricaNaoPositivaDefinida):
        validar_metrica(np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_ponto_na_borda_rejeitado():
    carta = carta_euclidiana(2, limite=1.0)
    with pytest.raises(FronteiraDominio):
        carta.verificar_interior(np.array([1.0, 0.0]))


def test_amostragem_deterministica(h3):
    assert np.array_equal(h3.metrica.amostrar(8, 42), h3.metrica.amostrar(8, 42))
    assert np.array_equal(h3.metrica.amostrar(8, 42, quase_aleatorio=True),
                          h3.metrica.amostrar(8, 42, quase_aleatorio=True))
