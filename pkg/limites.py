"""
Constante c do limite inferior λ₁(M) ≥ c²/4, limites clássicos e veredito.

    c = inf_M [(k−1)b − ‖H^F‖ − (n−m)(a + 2‖A‖ + ‖α^F‖) − ‖H‖]

O ínfimo é tomado sobre uma amostra quase aleatória de M; a amostra é
refinada por um fator fixo e os dois valores precisam concordar.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from configuracao import CONFIG, Veredito
from erros import ConjuntoAmostralVazio, DimensaoInvalida
from espacos_modelo import EspacoModelo
from imersao import MapaImersao, curvatura_media
from modelos_relatorio import (
    EntradaLimite,
    LimiteClassico,
    LimitesExemplo,
    PontoCurva,
    RelatorioLimite,
)
from submersao import MapaSubmersao, normas_pontuais


# ==============================
# AMOSTRAGEM DOS TERMOS
# ==============================

def amostrar_entrada(
    sub: MapaSubmersao,
    f: MapaImersao,
    modelo: EspacoModelo,
    n_amostras: Optional[int] = None,
    semente: Optional[int] = None,
    alpha: Optional[float] = None,
) -> EntradaLimite:
    """Normas pontuais em n_amostras pontos de M (Halton embaralhado na carta de M)."""
    if f.alvo.dim != sub.n:
        raise DimensaoInvalida(f"imersão em dimensão {f.alvo.dim}, espaço total de dimensão {sub.n}")
    n_amostras = n_amostras or CONFIG.AMOSTRAS_CONSTANTE_C
    semente = CONFIG.SEMENTE_PADRAO if semente is None else semente
    pontos = f.carta_fonte.amostrar(n_amostras, semente, quase_aleatorio=True)
    if len(pontos) == 0:
        raise ConjuntoAmostralVazio("nenhum ponto amostrado em M")
    series = {'norma_H': [], 'norma_HF': [], 'norma_A': [], 'norma_alphaF': []}
    for u in pontos:
        normas = normas_pontuais(sub, f.imagem(u))
        series['norma_H'].append(curvatura_media(f, u).norma)
        series['norma_HF'].append(normas['norma_HF'])
        series['norma_A'].append(normas['norma_A'])
        series['norma_alphaF'].append(normas['norma_alphaF'])
    return EntradaLimite(
        k=sub.k, m=f.m, n=sub.n,
        a=modelo.cota_superior, b=modelo.cota_inferior,
        pontos=[[float(x) for x in u] for u in pontos],
        alpha=alpha,
        **series,
    )


# ==============================
# CONSTANTE c
# ==============================

def valores_pontuais(entrada: EntradaLimite, curvatura_um: bool = False) -> np.ndarray:
    """Expressão de c em cada ponto amostrado."""
    H = np.asarray(entrada.norma_H)
    HF = np.asarray(entrada.norma_HF)
    A = np.asarray(entrada.norma_A)
    alphaF = np.asarray(entrada.norma_alphaF)
    codim = entrada.n - entrada.m
    if curvatura_um:
        return (entrada.k - 1) - H - HF - codim * (2.0 * A + alphaF + 1.0)
    return (entrada.k - 1) * entrada.b - HF - codim * (entrada.a + 2.0 * A + alphaF) - H


def constante_c(entrada: EntradaLimite, curvatura_um: bool = False) -> Tuple[float, List[float]]:
    """
    (c, ponto que atinge o ínfimo).

    Raises:
        ConjuntoAmostralVazio: nenhuma amostra.
    """
    if not entrada.pontos:
        raise ConjuntoAmostralVazio("constante c sem pontos amostrados")
    valores = valores_pontuais(entrada, curvatura_um)
    i = int(np.argmin(valores))
    return float(valores[i]), list(entrada.pontos[i])


def constante_c_supremos(entrada: EntradaLimite) -> float:
    """A mesma expressão com cada norma substituída pelo seu supremo amostrado."""
    sup = lambda nome: entrada.termo(nome).sup
    return ((entrada.k - 1) * entrada.b - sup('norma_HF')
            - (entrada.n - entrada.m) * (entrada.a + 2.0 * sup('norma_A') + sup('norma_alphaF'))
            - sup('norma_H'))


# ==============================
# LIMITES CLÁSSICOS E EXEMPLOS
# ==============================

def _faixa_amostrada(rotulo: str, inf: Optional[float], sup: Optional[float]) -> str:
    if sup is None:
        return f" ({rotulo} não amostrada)"
    if inf is None:
        return f" (sup {rotulo} = {sup:.6g})"
    return f" ({rotulo} amostrada em [{inf:.6g}, {sup:.6g}])"


def limites_classicos(
    m: int,
    b: float,
    alpha: Optional[float] = None,
    curvatura_maxima: Optional[float] = None,
    curvatura_ambiente: Optional[Tuple[float, float]] = None,
) -> List[LimiteClassico]:
    """
    McKean (m−1)²/4, Castillon (m−1)²(b−α)²/4 e Cheung–Leung (m−1−α)²/4.

    curvatura_maxima é o sup amostrado de K_M e curvatura_ambiente o par
    (inf, sup) de K̄ no espaço total. Hipótese violada ou não amostrada vira
    "inaplicável", nunca número.
    """
    if alpha is not None and alpha < 0:
        raise ValueError(f"α = {alpha} deve ser ≥ 0")
    tol = CONFIG.TOL_IDENTIDADE
    inf_amb, sup_amb = curvatura_ambiente if curvatura_ambiente is not None else (None, None)
    limites = []

    mckean = curvatura_maxima is not None and curvatura_maxima <= -1.0 + tol
    limites.append(LimiteClassico(
        nome="McKean", formula="(m−1)²/4", aplicavel=mckean,
        valor=(m - 1) ** 2 / 4.0 if mckean else None,
        hipotese="K_M ≤ −1" + _faixa_amostrada("K_M", None, curvatura_maxima),
    ))

    castillon = (sup_amb is not None and sup_amb <= -b * b + tol
                 and alpha is not None and alpha < b)
    limites.append(LimiteClassico(
        nome="Castillon", formula="(m−1)²(b−α)²/4", aplicavel=castillon,
        valor=(m - 1) ** 2 * (b - alpha) ** 2 / 4.0 if castillon else None,
        hipotese=f"‖H‖ ≤ α < b = {b:g} e K̄ ≤ −b² = {-b * b:.6g}" + _faixa_amostrada("K̄", inf_amb, sup_amb),
    ))

    hiperbolico = (inf_amb is not None and abs(inf_amb + 1.0) <= tol and abs(sup_amb + 1.0) <= tol)
    cheung_leung = hiperbolico and alpha is not None and alpha < m - 1
    limites.append(LimiteClassico(
        nome="Cheung–Leung", formula="(m−1−α)²/4", aplicavel=cheung_leung,
        valor=(m - 1 - alpha) ** 2 / 4.0 if cheung_leung else None,
        hipotese=f"K̄ ≡ −1 e ‖H‖ ≤ α < m−1 = {m - 1}" + _faixa_amostrada("K̄", inf_amb, sup_amb),
    ))
    return limites


def limites_exemplos(k: int, m: int, n: int, alpha: float) -> LimitesExemplo:
    """
    Pisos de c para produto warped sobre ℍ^k, 2(k+m)−3n−1−α, e para fibras
    totalmente geodésicas, k+m−n−1−α; cada um vale só se o piso for > 0.
    """
    if not (2 <= m <= n and 2 <= k <= n):
        raise DimensaoInvalida(f"dimensões inválidas: k={k}, m={m}, n={n}")
    if alpha < 0:
        raise ValueError(f"α = {alpha} deve ser ≥ 0")
    warped = 2 * (k + m) - 3 * n - 1 - alpha
    geodesicas = k + m - n - 1 - alpha
    return LimitesExemplo(
        piso_produto_warped=warped,
        aplicavel_produto_warped=warped > 0,
        limite_produto_warped=warped ** 2 / 4.0 if warped > 0 else None,
        piso_fibras_geodesicas=geodesicas,
        aplicavel_fibras_geodesicas=geodesicas > 0,
        limite_fibras_geodesicas=geodesicas ** 2 / 4.0 if geodesicas > 0 else None,
    )


# ==============================
# VEREDITO
# ==============================

def veredito(
    entrada: EntradaLimite,
    curva: Sequence[PontoCurva],
    refinada: Optional[EntradaLimite] = None,
    arquivo_curva: Optional[str] = None,
    curvatura_maxima: Optional[float] = None,
    curvatura_ambiente: Optional[Tuple[float, float]] = None,
    notas: Optional[List[str]] = None,
    tolerancia_concordancia: Optional[float] = None,
) -> RelatorioLimite:
    """
    PASSOU sse todo λ₁(r) ≥ c²/4 − ε(r); NAO_APLICAVEL se c ≤ 0; FALHOU se
    algum valor fica abaixo ou se c muda mais que a tolerância no refinamento.
    """
    c, ponto = constante_c(entrada)
    c_um, _ = constante_c(entrada, curvatura_um=True)
    notas = list(notas or [])
    if entrada.a != 1.0:
        notas.append(f"a = {entrada.a:g}: a forma com +1 só coincide com a forma geral quando a = 1")

    c_refinado, concordancia = None, None
    if refinada is not None:
        c_refinado, _ = constante_c(refinada)
        tolerancia = CONFIG.TOL_CONCORDANCIA_C if tolerancia_concordancia is None else tolerancia_concordancia
        concordancia = abs(c_refinado - c) <= tolerancia * max(abs(c), 1e-12)

    aplicavel = c > 0
    limite = c * c / 4.0 if aplicavel else None
    lambda1_min, margem = None, None
    if curva:
        lambda1_min = min(p.lambda1 for p in curva)
        if aplicavel:
            margem = min(p.lambda1 - limite for p in curva)

    if not aplicavel:
        resultado, motivo = Veredito.NAO_APLICAVEL, f"c = {c:.6g} ≤ 0: o teorema não afirma nada"
    elif concordancia is False:
        resultado = Veredito.FALHOU
        motivo = f"c instável sob refinamento: {c:.8g} contra {c_refinado:.8g}"
    elif not curva:
        resultado, motivo = Veredito.NAO_APLICAVEL, "sem curva λ₁(r) para comparar"
    else:
        abaixo = [p for p in curva if p.lambda1 < limite - p.error_estimate]
        if abaixo:
            resultado = Veredito.FALHOU
            motivo = f"λ₁({abaixo[0].r:g}) = {abaixo[0].lambda1:.8g} < c²/4 = {limite:.8g}"
        else:
            resultado, motivo = Veredito.PASSOU, f"todo λ₁(r) ≥ c²/4 = {limite:.8g}"

    exemplos = None
    if entrada.alpha is not None:
        exemplos = limites_exemplos(entrada.k, entrada.m, entrada.n, entrada.alpha)

    return RelatorioLimite(
        dimensoes={'k': entrada.k, 'm': entrada.m, 'n': entrada.n},
        a=entrada.a,
        b=entrada.b,
        termos={nome: entrada.termo(nome) for nome in ('norma_H', 'norma_HF', 'norma_A', 'norma_alphaF')},
        c=c,
        c_forma_curvatura_um=c_um,
        c_pelos_supremos=constante_c_supremos(entrada),
        ponto_c=ponto,
        c_refinado=c_refinado,
        concordancia_refinamento=concordancia,
        limite=limite,
        aplicavel=aplicavel,
        limites_classicos=limites_classicos(entrada.m, entrada.b, entrada.alpha,
                                            curvatura_maxima, curvatura_ambiente),
        limites_exemplo=exemplos,
        curva=list(curva),
        arquivo_curva=arquivo_curva,
        lambda1_min=lambda1_min,
        margem=margem,
        veredito=resultado,
        motivo=motivo,
        n_amostras=len(entrada.pontos),
        notas=notas,
    )
