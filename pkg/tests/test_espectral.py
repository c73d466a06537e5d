import numpy as np
import pytest
from scipy.special import jn_zeros

from erros import FuncaoNula, GradeGrossa, MontagemSingular, NaoMonotona, PontosInsuficientes
from espacos_modelo import criar_hiperbolico
from espectral import (
    ProblemaRadial,
    coeficiente_euclidiano,
    coeficiente_hiperbolico,
    curva_radial,
    estimar_tom,
    extrapolar_richardson,
    lambda1_bola_fem,
    lambda1_fem,
    lambda1_radial,
    malha_bola_geodesica,
    malha_retangulo,
    quociente_rayleigh,
    segundo_autovalor,
)
from geometria import carta_euclidiana

DISCO = jn_zeros(0, 1)[0] ** 2  # 5.7832...


def test_disco_radial():
    resultado = lambda1_radial(ProblemaRadial(2, coeficiente_euclidiano(2), 1.0))
    assert resultado.valor_relatado == pytest.approx(DISCO, rel=1e-4)
    assert resultado.positivo
    assert resultado.norma_residuo < 1e-8
    assert resultado.lambda2 > resultado.lambda1


def test_intervalo_radial():
    # (−1, 1): λ₁ = π²/4
    resultado = lambda1_radial(ProblemaRadial(1, coeficiente_euclidiano(1), 1.0))
    assert resultado.valor_relatado == pytest.approx(np.pi ** 2 / 4, rel=1e-5)


@pytest.mark.parametrize("raio", [1.0, 2.0, 5.0])
def test_h3_formula_exata(raio):
    resultado = lambda1_radial(ProblemaRadial(3, coeficiente_hiperbolico(3), raio))
    assert resultado.valor_relatado == pytest.approx(1.0 + np.pi ** 2 / raio ** 2, rel=1e-4)


def test_curva_h2_decrescente_acima_de_um_quarto():
    curva, _ = curva_radial(ProblemaRadial(2, coeficiente_hiperbolico(2), 4.0), [4.0, 6.0, 8.0, 10.0])
    valores = [p.lambda1 for p in curva]
    assert all(v >= 0.25 for v in valores)
    assert all(a > b for a, b in zip(valores, valores[1:]))
    tom = estimar_tom([(p.r, p.lambda1) for p in curva], [p.error_estimate for p in curva])
    assert tom.monotona
    assert abs(tom.assintota - 0.25) < 0.05


def test_curva_h3_tom():
    raios = [4.0, 6.0, 8.0, 10.0]
    curva, _ = curva_radial(ProblemaRadial(3, coeficiente_hiperbolico(3), 4.0), raios)
    tom = estimar_tom([(p.r, p.lambda1) for p in curva])
    assert abs(tom.assintota - 1.0) < 0.1


def test_quociente_tenda():
    # tenda em (−π/2, π/2): 12/π² ≥ λ₁ = 1
    problema = ProblemaRadial(1, coeficiente_euclidiano(1), np.pi / 2)
    tenda = problema.raio - problema.nos
    assert quociente_rayleigh(problema, tenda) == pytest.approx(12 / np.pi ** 2, rel=1e-3)
    assert quociente_rayleigh(problema, tenda) >= lambda1_radial(problema).lambda1


def test_quociente_funcao_nula():
    problema = ProblemaRadial(2, coeficiente_euclidiano(2), 1.0)
    with pytest.raises(FuncaoNula):
        quociente_rayleigh(problema, np.zeros(problema.n_grade + 1))


def test_grade_grossa():
    with pytest.raises(GradeGrossa):
        lambda1_radial(ProblemaRadial(2, coeficiente_hiperbolico(2), 4.0, n_grade=16), tolerancia=1e-12)


def test_grade_minima():
    with pytest.raises(ValueError):
        ProblemaRadial(2, coeficiente_euclidiano(2), 1.0, n_grade=4)


def test_volume_nao_positivo():
    problema = ProblemaRadial(2, lambda rho: np.asarray(rho) - 0.5, 1.0)
    with pytest.raises(MontagemSingular):
        lambda1_radial(problema)


def test_quadrado_fem():
    carta = carta_euclidiana(2, limite=10.0)
    dominio = malha_retangulo(carta, (0.0, np.pi), (0.0, np.pi), 24, 24)
    resultado = lambda1_fem(dominio)
    assert resultado.lambda1 == pytest.approx(2.0, rel=2e-2)
    assert resultado.positivo
    assert segundo_autovalor(dominio, resultado) == pytest.approx(5.0, rel=5e-2)


def test_disco_fem_richardson():
    resultado = lambda1_bola_fem(carta_euclidiana(2, limite=10.0), [0.0, 0.0], 1.0, niveis=3)
    assert resultado.valor_relatado == pytest.approx(DISCO, rel=1e-2)
    assert resultado.estimativa_erro < 0.05


def test_bola_hiperbolica_fem_concorda_com_radial():
    h2 = criar_hiperbolico(2)
    fem = lambda1_bola_fem(h2.metrica, [0.0, 0.0], 1.0, niveis=2)
    radial = lambda1_radial(ProblemaRadial(2, coeficiente_hiperbolico(2), 1.0))
    assert fem.valor_relatado == pytest.approx(radial.valor_relatado, rel=1e-2)


def test_quociente_rayleigh_malha():
    dominio = malha_bola_geodesica(carta_euclidiana(2, limite=10.0), [0.0, 0.0], 1.0, 8, 32)
    r = np.linalg.norm(dominio.vertices, axis=1)
    tenda = np.where(dominio.fronteira, 0.0, 1.0 - r)
    assert quociente_rayleigh(dominio, tenda) >= lambda1_fem(dominio).lambda1
    with pytest.raises(ValueError):
        quociente_rayleigh(dominio, np.ones(dominio.vertices.shape[0]))


def test_richardson():
    extrapolado, erro, ordem = extrapolar_richardson([4.0, 3.25, 3.0625])
    assert extrapolado == pytest.approx(3.0)
    assert erro == pytest.approx(0.0625)
    assert ordem == pytest.approx(2.0)


def test_tom_exige_tres_pontos():
    with pytest.raises(PontosInsuficientes):
        estimar_tom([(1.0, 2.0), (2.0, 1.0)])


def test_tom_rejeita_curva_crescente():
    with pytest.raises(NaoMonotona):
        estimar_tom([(1.0, 1.0), (2.0, 1.5), (3.0, 1.2)])


def test_tom_segundo_centro():
    curva = [(r, 0.25 + 1.0 / r ** 2) for r in (2.0, 3.0, 4.0)]
    outra = [(r, v + 1e-4) for r, v in curva]
    tom = estimar_tom(curva, curva_segundo_centro=outra)
    assert tom.assintota == pytest.approx(0.25, abs=1e-4)
    assert tom.diferenca_segundo_centro == pytest.approx(1e-4)
