import numpy as np
import pytest

from cenario import carregar_cenario, montar
from configuracao import Veredito
from erros import ConjuntoAmostralVazio, DimensaoInvalida
from espacos_modelo import amostrar_curvatura_seccional, criar_hiperbolico
from imersao import imersao_fatia, imersao_horosfera, imersao_totalmente_geodesica
from limites import (
    amostrar_entrada,
    constante_c,
    constante_c_supremos,
    limites_classicos,
    limites_exemplos,
    valores_pontuais,
    veredito,
)
from modelos_relatorio import EntradaLimite, PontoCurva
from orquestrador import Parametros, curvatura_ambiente_amostrada
from submersao import submersao_identidade, submersao_produto


def _entrada(k=4, m=4, n=5, a=1.0, b=1.0, H=(0.0,), HF=(0.0,), A=(0.0,), alphaF=(0.0,), alpha=None):
    pontos = [[float(i)] for i in range(len(H))]
    return EntradaLimite(k=k, m=m, n=n, a=a, b=b, pontos=pontos, norma_H=list(H), norma_HF=list(HF),
                         norma_A=list(A), norma_alphaF=list(alphaF), alpha=alpha)


def _curva(*valores):
    return [PontoCurva(r=float(i + 1), lambda1=v, mesh_parameter=0.01, error_estimate=1e-6)
            for i, v in enumerate(valores)]


def test_constante_c_formula():
    entrada = _entrada(k=3, m=2, n=4, a=1.5, b=1.0, H=(0.1, 0.3), HF=(0.2, 0.0), A=(0.05, 0.1), alphaF=(0.0, 0.2))
    esperado = [2.0 - 0.2 - 2 * (1.5 + 0.1 + 0.0) - 0.1, 2.0 - 0.0 - 2 * (1.5 + 0.2 + 0.2) - 0.3]
    assert np.allclose(valores_pontuais(entrada), esperado)
    c, ponto = constante_c(entrada)
    assert c == pytest.approx(min(esperado))
    assert ponto == [1.0]
    assert constante_c_supremos(entrada) == pytest.approx(2.0 - 0.2 - 2 * (1.5 + 0.2 + 0.2) - 0.3)


def test_forma_com_curvatura_um():
    entrada = _entrada(k=3, m=2, n=3, a=2.0, b=2.0)
    assert constante_c(entrada)[0] == pytest.approx(2 * 2.0 - 2.0)
    assert constante_c(entrada, curvatura_um=True)[0] == pytest.approx(2 - 1.0)


def test_entrada_vazia():
    entrada = EntradaLimite(k=2, m=2, n=2, a=1.0, b=1.0, pontos=[], norma_H=[], norma_HF=[],
                            norma_A=[], norma_alphaF=[])
    with pytest.raises(ConjuntoAmostralVazio):
        constante_c(entrada)


def test_entrada_rejeita_b_maior_que_a():
    with pytest.raises(ValueError):
        _entrada(a=0.5, b=1.0)


def test_limites_exemplos_formulas():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(2, 12))
        k = int(rng.integers(2, n + 1))
        m = int(rng.integers(2, n + 1))
        alpha = float(rng.uniform(0.0, 3.0))
        exemplos = limites_exemplos(k, m, n, alpha)
        warped = 2 * (k + m) - 3 * n - 1 - alpha
        geodesicas = k + m - n - 1 - alpha
        assert exemplos.piso_produto_warped == warped
        assert exemplos.piso_fibras_geodesicas == geodesicas
        assert exemplos.aplicavel_produto_warped == (warped > 0)
        assert exemplos.aplicavel_fibras_geodesicas == (geodesicas > 0)
        if warped > 0:
            assert exemplos.limite_produto_warped == warped ** 2 / 4
        else:
            assert exemplos.limite_produto_warped is None


def test_limites_exemplos_valores():
    assert limites_exemplos(4, 4, 5, 0.0).limite_fibras_geodesicas == 1.0
    assert limites_exemplos(3, 2, 3, 0.0).limite_fibras_geodesicas == 0.25
    assert limites_exemplos(3, 3, 3, 0.0).piso_produto_warped == 2.0
    with pytest.raises(DimensaoInvalida):
        limites_exemplos(2, 4, 3, 0.0)
    with pytest.raises(ValueError):
        limites_exemplos(2, 2, 3, -0.1)


def test_limites_classicos():
    hiperbolico = (-1.0, -1.0)
    mckean, castillon, cheung = limites_classicos(2, 1.0, alpha=0.5, curvatura_maxima=-1.0,
                                                  curvatura_ambiente=hiperbolico)
    assert mckean.valor == pytest.approx(0.25)
    assert castillon.valor == pytest.approx(0.0625)
    assert cheung.valor == pytest.approx(0.0625)
    assert "amostrada em [-1, -1]" in castillon.hipotese


def test_limites_classicos_hipoteses():
    mckean, castillon, cheung = limites_classicos(3, 1.0, alpha=None, curvatura_maxima=0.0,
                                                  curvatura_ambiente=(-1.0, -1.0))
    assert not mckean.aplicavel and mckean.valor is None
    assert not castillon.aplicavel
    assert not cheung.aplicavel
    _, castillon, cheung = limites_classicos(3, 1.0, alpha=1.5, curvatura_ambiente=(-1.0, -1.0))
    assert not castillon.aplicavel
    assert cheung.aplicavel and cheung.valor == pytest.approx(0.0625)


def test_classicos_sem_curvatura_amostrada():
    limites = limites_classicos(3, 1.0, alpha=0.0)
    assert not any(limite.aplicavel for limite in limites)
    assert all("não amostrada" in limite.hipotese for limite in limites)


def test_classicos_exigem_curvatura_ambiente():
    # K̄ ∈ [−1, −0.5]: nem K̄ ≤ −b² nem K̄ ≡ −1
    _, castillon, cheung = limites_classicos(3, 1.0, alpha=0.0, curvatura_ambiente=(-1.0, -0.5))
    assert not castillon.aplicavel and castillon.valor is None
    assert not cheung.aplicavel and cheung.valor is None
    assert "[-1, -0.5]" in castillon.hipotese
    _, castillon, cheung = limites_classicos(3, 0.5, alpha=0.0, curvatura_ambiente=(-1.0, -0.5))
    assert castillon.aplicavel and castillon.valor == pytest.approx(0.25)
    assert not cheung.aplicavel


def test_classicos_inaplicaveis_na_fatia_h4_r():
    h4 = criar_hiperbolico(4)
    sub = submersao_produto(h4, 1)
    curvaturas = amostrar_curvatura_seccional(sub.total, 40, 1)[:, 0]
    ambiente = (float(curvaturas.min()), float(curvaturas.max()))
    assert ambiente[1] > -0.9
    _, castillon, cheung = limites_classicos(4, 1.0, alpha=0.0, curvatura_ambiente=ambiente)
    assert not castillon.aplicavel
    assert not cheung.aplicavel


def test_classicos_inaplicaveis_no_exemplo_warped(cenarios):
    cenario, _ = carregar_cenario(cenarios / "exemplo_warped.toml")
    montagem = montar(cenario)
    inf, sup = curvatura_ambiente_amostrada(montagem, Parametros.de_cenario(cenario))
    # K̄(s) = 0.05 sin s − (1 + 0.05 cos s)² chega acima de −b² = −0.9025
    assert inf < -1.0
    assert sup > -0.95 ** 2
    _, castillon, cheung = limites_classicos(2, 0.95, alpha=0.0, curvatura_ambiente=(inf, sup))
    assert not castillon.aplicavel
    assert not cheung.aplicavel


def test_veredito_passa():
    relatorio = veredito(_entrada(), _curva(3.0, 2.5, 2.3), refinada=_entrada())
    assert relatorio.c == pytest.approx(2.0)
    assert relatorio.limite == pytest.approx(1.0)
    assert relatorio.veredito is Veredito.PASSOU
    assert relatorio.margem == pytest.approx(1.3)
    assert relatorio.concordancia_refinamento


def test_veredito_falha_abaixo_do_limite():
    relatorio = veredito(_entrada(), _curva(3.0, 0.9))
    assert relatorio.veredito is Veredito.FALHOU
    assert "λ₁(2)" in relatorio.motivo


def test_veredito_falha_sem_concordancia():
    refinada = _entrada(H=(0.5,))
    relatorio = veredito(_entrada(), _curva(3.0), refinada=refinada)
    assert relatorio.veredito is Veredito.FALHOU
    assert relatorio.concordancia_refinamento is False


def test_veredito_nao_aplicavel():
    relatorio = veredito(_entrada(H=(3.0,)), _curva(3.0))
    assert relatorio.veredito is Veredito.NAO_APLICAVEL
    assert relatorio.limite is None
    assert relatorio.model_dump()['veredito'] == "NAO_APLICAVEL"


def test_veredito_com_alpha_inclui_exemplos():
    relatorio = veredito(_entrada(alpha=0.0), _curva(3.0))
    assert relatorio.limites_exemplo.limite_fibras_geodesicas == pytest.approx(1.0)


def test_fatia_h4_r():
    h4 = criar_hiperbolico(4)
    sub = submersao_produto(h4, 1)
    f = imersao_fatia(sub.total, 4)
    c, _ = constante_c(amostrar_entrada(sub, f, h4, n_amostras=10, semente=1, alpha=0.0))
    assert c == pytest.approx(2.0, abs=1e-8)


def test_cheung_leung_justo(h3):
    sub = submersao_identidade(h3.metrica)
    f = imersao_totalmente_geodesica(h3.metrica, 2)
    entrada = amostrar_entrada(sub, f, h3, n_amostras=20, semente=2, alpha=0.0)
    relatorio = veredito(entrada, _curva(0.4, 0.3))
    assert relatorio.c == pytest.approx(1.0, abs=1e-8)
    assert relatorio.limite == pytest.approx(0.25, abs=1e-8)
    assert relatorio.veredito is Veredito.PASSOU


def test_horosfera_nao_aplicavel(h3):
    sub = submersao_identidade(h3.metrica)
    f = imersao_horosfera(h3.metrica)
    entrada = amostrar_entrada(sub, f, h3, n_amostras=20, semente=3)
    relatorio = veredito(entrada, _curva(1.0))
    assert relatorio.c == pytest.approx(-1.0, abs=1e-8)
    assert relatorio.veredito is Veredito.NAO_APLICAVEL


def test_controle_negativo_horosfera_corrompida(h3):
    # ‖H‖ trocado por zero: c passa a 1 e a curva plana (λ₁ → 0) é reprovada
    sub = submersao_identidade(h3.metrica)
    f = imersao_horosfera(h3.metrica)
    entrada = amostrar_entrada(sub, f, h3, n_amostras=10, semente=3)
    corrompida = entrada.model_copy(update={'norma_H': [0.0] * len(entrada.pontos)})
    relatorio = veredito(corrompida, _curva(0.6, 0.15, 0.04))
    assert relatorio.c == pytest.approx(1.0, abs=1e-8)
    assert relatorio.veredito is Veredito.FALHOU
