import numpy as np
import pytest
import torch

from erros import FibraDegenerada
from espacos_modelo import criar_fibra_warped
from geometria import CampoEscalar, carta_euclidiana
from submersao import (
    MapaSubmersao,
    campo_base_aleatorio,
    decompor,
    desvio_isometria,
    desvios_tipagem,
    geometria_fibra,
    levantamento_horizontal,
    norma_A_oraculo,
    normas_pontuais,
    residuo_conexao_basica,
    residuo_gradiente_levantado,
    residuos_lemas,
    residuos_proposicao,
    rotacao_vertical_aleatoria,
    submersao_fibra_warped,
    submersao_hopf,
    submersao_identidade,
    tensores_oneill,
    vertical_aleatorio,
)


@pytest.fixture
def warped_h2_r(h2):
    fibra = carta_euclidiana(1, limite=60.0, nome="fibra")
    ambiente = criar_fibra_warped(h2, fibra, lambda x: torch.exp(0.5 * x[1]), exigir_hipotese=True)
    return submersao_fibra_warped(ambiente)


def _residuos(sub, campo, n=20, semente=5):
    rng = np.random.default_rng(semente)
    maximo = {}
    for i, p in enumerate(sub.total.amostrar(n, semente)):
        X = campo_base_aleatorio(sub.k, semente + 2 * i)
        Y = campo_base_aleatorio(sub.k, semente + 2 * i + 1)
        V, W = vertical_aleatorio(sub, p, rng), vertical_aleatorio(sub, p, rng)
        for nome, valor in residuos_lemas(sub, campo, X, Y, V, W, p).model_dump().items():
            maximo[nome] = max(maximo.get(nome, 0.0), valor)
    return maximo


def test_lemas_no_produto(produto_h2_r, h2):
    residuos = _residuos(produto_h2_r, h2.busemann.campo)
    identidades = {k: v for k, v in residuos.items() if k != 'discrepancia_sinal_impresso'}
    assert max(identidades.values()) < 1e-6
    # fibras totalmente geodésicas: os dois sinais coincidem
    assert residuos['discrepancia_sinal_impresso'] < 1e-6


def test_lemas_no_produto_warped(warped_h2_r, h2):
    residuos = _residuos(warped_h2_r, h2.busemann.campo)
    assert residuos['laplaciano'] < 1e-6
    assert residuos['divergencia'] < 1e-6
    assert residuos['hessiana_vertical'] < 1e-6
    assert residuos['hessiana_mista'] < 1e-6
    # H^F = −½ ∂_s e F̄ = −s: o sinal impresso erra por 2⟨grad F̃, H^F⟩ = 1
    assert residuos['discrepancia_sinal_impresso'] == pytest.approx(1.0, abs=1e-6)


def test_curvatura_media_das_fibras_warped(warped_h2_r):
    p = np.array([0.3, 0.2, 0.1])
    fibra = geometria_fibra(warped_h2_r, p)
    assert np.allclose(fibra.HF.componentes, [0.0, -0.5, 0.0], atol=1e-10)
    assert fibra.norma_HF == pytest.approx(0.5, abs=1e-10)
    assert fibra.norma_alpha == pytest.approx(0.5, abs=1e-8)


def test_A_nulo_em_produtos_warped(warped_h2_r, produto_h2_r):
    for sub in (warped_h2_r, produto_h2_r):
        for p in sub.total.amostrar(10, 9):
            assert normas_pontuais(sub, p)['norma_A'] < 1e-8


def test_proposicao_campos_basicos(warped_h2_r):
    for i, p in enumerate(warped_h2_r.total.amostrar(10, 4)):
        X = campo_base_aleatorio(2, 100 + i)
        Y = campo_base_aleatorio(2, 200 + i)
        assert max(residuos_proposicao(warped_h2_r, X, Y, p).values()) < 1e-6
        assert residuo_conexao_basica(warped_h2_r, X, Y, p) < 1e-6


def test_gradiente_levantado(warped_h2_r, h2):
    for p in warped_h2_r.total.amostrar(10, 2):
        assert residuo_gradiente_levantado(warped_h2_r, h2.busemann.campo, p) < 1e-8


def test_isometria_e_decomposicao(warped_h2_r):
    p = np.array([0.1, -0.4, 0.3])
    assert desvio_isometria(warped_h2_r, p) < 1e-10
    v = np.array([0.5, -1.0, 2.0])
    vertical, horizontal = decompor(warped_h2_r, p, v)
    assert np.allclose(vertical.componentes + horizontal.componentes, v)
    G = warped_h2_r.total.componentes(p)
    assert abs(vertical.componentes @ G @ horizontal.componentes) < 1e-12
    X = np.array([0.7, -0.2])
    lift = levantamento_horizontal(warped_h2_r, p, X).componentes
    assert np.allclose(warped_h2_r.diferencial(p) @ lift, X, atol=1e-12)


def test_tipagem_oneill(warped_h2_r):
    p = np.array([0.2, 0.3, -0.1])
    assert max(desvios_tipagem(warped_h2_r, p).values()) < 1e-8


def test_independencia_do_referencial_vertical():
    sub = submersao_hopf()
    p = np.array([0.6, 0.3, -0.2])
    rotacao = rotacao_vertical_aleatoria(sub, 1)
    a, b = geometria_fibra(sub, p), geometria_fibra(sub, p, rotacao)
    assert np.allclose(a.HF.componentes, b.HF.componentes, atol=1e-10)
    assert tensores_oneill(sub, p).norma_A == pytest.approx(tensores_oneill(sub, p, rotacao).norma_A, abs=1e-8)


def test_hopf_norma_A_igual_produto_das_normas():
    sub = submersao_hopf()
    rng = np.random.default_rng(0)
    V = np.array([0.0, 1.0, 1.0])
    for p in sub.total.amostrar(10, 3):
        X = sub.base_horizontal(p) @ rng.standard_normal(2)
        esperado = sub.total.norma(p, X) * sub.total.norma(p, V)
        calculado = sub.total.norma(p, tensores_oneill(sub, p).avaliar_A(X, V))
        assert calculado == pytest.approx(esperado, abs=1e-6)
        assert norma_A_oraculo(sub, p, X, V) == pytest.approx(esperado, abs=1e-6)


def test_hopf_fibras_geodesicas():
    sub = submersao_hopf()
    normas = normas_pontuais(sub, np.array([0.5, 0.1, 0.2]))
    assert normas['norma_HF'] < 1e-8
    assert normas['norma_T'] < 1e-8
    assert normas['norma_A'] == pytest.approx(1.0, abs=1e-6)


def test_lemas_em_hopf():
    sub = submersao_hopf()
    campo = CampoEscalar(sub.base, lambda u: torch.sin(u[0]) * torch.cos(u[1]))
    residuos = _residuos(sub, campo, n=10)
    identidades = {k: v for k, v in residuos.items() if k != 'discrepancia_sinal_impresso'}
    assert max(identidades.values()) < 1e-6


def test_identidade_anula_fibra(h3):
    sub = submersao_identidade(h3.metrica)
    assert normas_pontuais(sub, np.array([0.1, 0.2, 0.3])) == {
        'norma_HF': 0.0, 'norma_alphaF': 0.0, 'norma_A': 0.0, 'norma_T': 0.0}


def test_fibra_degenerada():
    total = carta_euclidiana(3)
    base = carta_euclidiana(2)
    sub = MapaSubmersao("degenerada", total, base, lambda x: torch.stack([x[0], 2.0 * x[0]]))
    with pytest.raises(FibraDegenerada):
        sub.base_vertical(np.array([0.1, 0.2, 0.3]))
