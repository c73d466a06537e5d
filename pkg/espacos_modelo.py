"""
Variedades modelo e suas funções de Busemann.

- ℍ^k(−a²) na carta horosférica e^{−2as}dx² + ds²;
- modelo de linha warped e^{2w(s)}g + ds² sobre uma fibra (N^{k−1}, g);
- ambiente com fibra warped ℍ^k ×_ρ F.

Também reúne as verificações de comparação da Hessiana (sanduíche
b‖X‖² ≤ Hess F̄(X,X) ≤ a‖X‖² para X ⊥ grad F̄) e o piso ΔF̄ ≥ (k−1)b.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import torch
from scipy.optimize import minimize_scalar
from torch.func import jacfwd, vmap

from configuracao import CONFIG
from erros import (
    AmostraForaDominio,
    CurvaturaInvalida,
    DerivadaNaoPositiva,
    DimensaoInvalida,
    HipoteseViolada,
    VetorNaoOrtogonal,
)
from geometria import (
    DTYPE,
    CampoEscalar,
    FuncaoTorch,
    MetricaCarta,
    bloco_diagonal,
    constante_em,
    curvatura_seccional,
    gradiente,
    hessiana,
    laplaciano,
    para_tensor,
)
from modelos_relatorio import RelatorioVerificacao


@dataclass(frozen=True, eq=False)
class CampoBusemann:
    """Função de Busemann explícita: F̄ = sinal·s (s é a última coordenada)."""
    campo: CampoEscalar
    sinal: float


class EspacoModelo(ABC):
    """Interface comum dos modelos com cotas b ≤ (curvatura ou w′) ≤ a."""
    k: int
    metrica: MetricaCarta
    busemann: CampoBusemann

    @property
    @abstractmethod
    def cota_superior(self) -> float:
        pass

    @property
    @abstractmethod
    def cota_inferior(self) -> float:
        pass

    @abstractmethod
    def hessiana_fechada(self, p) -> np.ndarray:
        """Hess F̄ pela fórmula fechada."""

    @abstractmethod
    def laplaciano_fechado(self, p) -> float:
        """ΔF̄ pela fórmula fechada."""


# ==============================
# ℍ^k(−a²)
# ==============================

@dataclass(frozen=True, eq=False)
class ModeloHiperbolico(EspacoModelo):
    k: int
    a: float
    metrica: MetricaCarta
    busemann: CampoBusemann

    @property
    def cota_superior(self) -> float:
        return self.a

    @property
    def cota_inferior(self) -> float:
        return self.a

    def hessiana_fechada(self, p) -> np.ndarray:
        fator = self.a * np.exp(-2.0 * self.a * p[-1])
        return np.diag(np.r_[np.full(self.k - 1, fator), 0.0])

    def laplaciano_fechado(self, p=None) -> float:
        return (self.k - 1) * self.a


def metrica_hiperbolica(k: int, a: float) -> FuncaoTorch:
    def metrica(x):
        fator = torch.exp(-2.0 * a * x[-1])
        return torch.diag_embed(torch.cat([fator.expand(k - 1), constante_em(x, 1.0).reshape(1)]))
    return metrica


def criar_hiperbolico(k: int, a: float = 1.0) -> ModeloHiperbolico:
    """
    ℍ^k(−a²) na carta (x_1, ..., x_{k−1}, s).

    A função de Busemann do raio t ↦ (x₀, t) é F̄ = −s: gradiente unitário,
    Hess F̄ = a·e^{−2as}dx² e ΔF̄ = (k−1)a.
    """
    if int(k) != k or k < 2:
        raise DimensaoInvalida(f"k = {k}: exige-se k ≥ 2")
    if not a > 0:
        raise CurvaturaInvalida(f"a = {a}: exige-se a > 0")
    k = int(k)
    limite = CONFIG.LIMITE_CARTA
    limite_s = min(limite, 20.0 / a)
    caixa = CONFIG.CAIXA_AMOSTRAGEM
    limites = np.array([[-limite, limite]] * (k - 1) + [[-limite_s, limite_s]])
    amostragem = np.array([[-caixa, caixa]] * k)
    metrica = MetricaCarta(k, metrica_hiperbolica(k, a), limites, amostragem, f"H{k}(a={a:g})")
    campo = CampoEscalar(metrica, lambda x: -x[-1], "busemann")
    return ModeloHiperbolico(k, float(a), metrica, CampoBusemann(campo, -1.0))


# ==============================
# MODELO DE LINHA WARPED
# ==============================

@dataclass(frozen=True, eq=False)
class ModeloLinhaWarped(EspacoModelo):
    fibra_base: MetricaCarta
    w: FuncaoTorch
    faixa_s: Tuple[float, float]
    a: float
    b: float
    metrica: MetricaCarta
    busemann: CampoBusemann
    declarado: bool = False

    @property
    def k(self) -> int:
        return self.fibra_base.dim + 1

    @property
    def cota_superior(self) -> float:
        return self.a

    @property
    def cota_inferior(self) -> float:
        return self.b

    def w_linha(self, s: float) -> float:
        return float(jacfwd(self.w)(torch.tensor(float(s), dtype=DTYPE)))

    def hessiana_fechada(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        s = p[-1]
        gN = self.fibra_base.avaliar(p[:-1])
        fator = self.w_linha(s) * np.exp(2.0 * float(self.w(torch.tensor(s, dtype=DTYPE))))
        H = np.zeros((self.k, self.k))
        H[:-1, :-1] = fator * gN
        return H

    def laplaciano_fechado(self, p) -> float:
        return self.w_linha(p[-1]) * (self.k - 1)


def _extremo_w_linha(w_linha, grade: np.ndarray, valores: np.ndarray, maximo: bool) -> float:
    """Refina o extremo de w′ encontrado na grade densa."""
    i = int(np.argmax(valores) if maximo else np.argmin(valores))
    esquerda = grade[max(i - 1, 0)]
    direita = grade[min(i + 1, grade.size - 1)]
    sinal = -1.0 if maximo else 1.0
    if direita <= esquerda:
        return float(valores[i])
    resultado = minimize_scalar(lambda s: sinal * w_linha(s), bounds=(esquerda, direita),
                                method='bounded', options={'xatol': 1e-12})
    refinado = sinal * float(resultado.fun)
    return max(refinado, float(valores[i])) if maximo else min(refinado, float(valores[i]))


def criar_linha_warped(
    fibra_base: MetricaCarta,
    w: FuncaoTorch,
    faixa_s: Tuple[float, float],
    limites_declarados: Optional[Tuple[float, float]] = None,
    nome: str = "linha_warped",
) -> ModeloLinhaWarped:
    """
    Modelo e^{2w(s)}g + ds² com F̄ = s.

    Args:
        fibra_base: Carta de (N^{k−1}, g).
        w: Função torch de um escalar s.
        faixa_s: Intervalo de s da carta.
        limites_declarados: (a, b) declarados no cenário; conferidos contra a amostragem.

    Raises:
        DerivadaNaoPositiva: w′ ≤ 0 em algum ponto da faixa.
        HipoteseViolada: w′ amostrado escapa de [b, a] declarado.
    """
    s0, s1 = float(faixa_s[0]), float(faixa_s[1])
    if not s1 > s0:
        raise DimensaoInvalida(f"faixa de s inválida: {faixa_s}")
    if fibra_base.dim < 1:
        raise DimensaoInvalida("a fibra base precisa ter dimensão ≥ 1")

    grade = np.linspace(s0, s1, CONFIG.AMOSTRAS_DERIVADA_W)
    valores = vmap(jacfwd(w))(torch.tensor(grade, dtype=DTYPE)).detach().numpy()
    i_min = int(np.argmin(valores))
    if valores[i_min] <= 0:
        raise DerivadaNaoPositiva(float(grade[i_min]), float(valores[i_min]))

    w_linha = lambda s: float(jacfwd(w)(torch.tensor(float(s), dtype=DTYPE)))
    b = _extremo_w_linha(w_linha, grade, valores, maximo=False)
    a = _extremo_w_linha(w_linha, grade, valores, maximo=True)
    if b <= 0:
        raise DerivadaNaoPositiva(float(grade[i_min]), b)

    declarado = limites_declarados is not None
    if declarado:
        a_decl, b_decl = (float(v) for v in limites_declarados)
        if not 0 < b_decl <= a_decl:
            raise HipoteseViolada(f"cotas declaradas inválidas: a={a_decl}, b={b_decl}")
        folga = CONFIG.TOL_IDENTIDADE
        if b < b_decl - folga or a > a_decl + folga:
            raise HipoteseViolada(
                f"w′ amostrado em [{b:.6g}, {a:.6g}] escapa das cotas declaradas [{b_decl}, {a_decl}]"
            )
        a, b = a_decl, b_decl

    def metrica(x):
        s = x[-1]
        gN = fibra_base.funcao_metrica(x[:-1])
        return bloco_diagonal(torch.exp(2.0 * w(s)) * gN, constante_em(x, 1.0).reshape(1, 1))

    margem = 1e-3 * (s1 - s0)
    limites = np.vstack([fibra_base.limites, [[s0, s1]]])
    amostragem = np.vstack([fibra_base.amostragem, [[s0 + margem, s1 - margem]]])
    carta = MetricaCarta(fibra_base.dim + 1, metrica, limites, amostragem, nome)
    campo = CampoEscalar(carta, lambda x: x[-1], "busemann")
    return ModeloLinhaWarped(fibra_base, w, (s0, s1), float(a), float(b), carta,
                             CampoBusemann(campo, 1.0), declarado)


# ==============================
# AMBIENTE COM FIBRA WARPED
# ==============================

@dataclass(frozen=True, eq=False)
class AmbienteFibraWarped:
    """B ×_ρ F com métrica h ⊕ ρ²g_F (coordenadas da base primeiro)."""
    base: EspacoModelo
    fibra: MetricaCarta
    rho: FuncaoTorch
    metrica: MetricaCarta
    hipotese_rho: bool

    @property
    def n(self) -> int:
        return self.metrica.dim


def razao_gradiente_rho(base: EspacoModelo, rho: FuncaoTorch, p) -> float:
    """‖grad ρ‖/ρ no ponto p da base."""
    campo = CampoEscalar(base.metrica, rho, "rho")
    return gradiente(campo, p).norma(base.metrica) / campo.valor(p)


def criar_fibra_warped(
    base: EspacoModelo,
    fibra: MetricaCarta,
    rho: FuncaoTorch,
    exigir_hipotese: bool = False,
    n_amostras: Optional[int] = None,
    semente: Optional[int] = None,
    nome: str = "fibra_warped",
) -> AmbienteFibraWarped:
    """
    Monta B ×_ρ F. Com `exigir_hipotese`, confere ‖grad ρ‖/ρ ≤ 1 na amostra.

    Raises:
        HipoteseViolada: ρ ≤ 0 ou ‖grad ρ‖/ρ > 1 em algum ponto amostrado.
    """
    k = base.metrica.dim
    n_amostras = n_amostras or CONFIG.AMOSTRAS_VERIFICACAO
    semente = CONFIG.SEMENTE_PADRAO if semente is None else semente
    for p in base.metrica.amostrar(n_amostras, semente):
        valor = float(rho(para_tensor(p)))
        if not valor > 0:
            raise HipoteseViolada(f"ρ({p}) = {valor:.6g} não é positivo")
        if exigir_hipotese and razao_gradiente_rho(base, rho, p) > 1.0 + CONFIG.TOL_IDENTIDADE:
            raise HipoteseViolada(f"‖grad ρ‖/ρ > 1 em {p}")

    def metrica(x):
        return bloco_diagonal(base.metrica.funcao_metrica(x[:k]),
                              rho(x[:k]) ** 2 * fibra.funcao_metrica(x[k:]))

    limites = np.vstack([base.metrica.limites, fibra.limites])
    amostragem = np.vstack([base.metrica.amostragem, fibra.amostragem])
    carta = MetricaCarta(k + fibra.dim, metrica, limites, amostragem, nome)
    return AmbienteFibraWarped(base, fibra, rho, carta, exigir_hipotese)


# ==============================
# VERIFICAÇÕES
# ==============================

def razao_sanduiche(modelo: EspacoModelo, p, X) -> float:
    """Hess F̄(X,X)/‖X‖² para X ⊥ grad F̄."""
    p = np.asarray(p, dtype=float)
    X = np.asarray(X, dtype=float)
    if not modelo.metrica.contem(p):
        raise AmostraForaDominio(f"{p} fora da carta {modelo.metrica.nome}")
    G = modelo.metrica.componentes(p)
    grad = gradiente(modelo.busemann.campo, p).componentes
    norma_x = np.sqrt(X @ G @ X)
    if norma_x == 0:
        raise VetorNaoOrtogonal("X nulo")
    if abs(X @ G @ grad) > CONFIG.TOL_ORTOGONALIDADE * max(1.0, norma_x):
        raise VetorNaoOrtogonal("X não é ortogonal a grad F̄")
    return hessiana(modelo.busemann.campo, p).avaliar(X, X) / norma_x ** 2


def vetor_ortogonal_aleatorio(modelo: EspacoModelo, p, rng: np.random.Generator) -> np.ndarray:
    """Gram–Schmidt de um vetor gaussiano contra grad F̄."""
    G = modelo.metrica.componentes(p)
    grad = gradiente(modelo.busemann.campo, p).componentes
    unitario = grad / np.sqrt(grad @ G @ grad)
    z = rng.standard_normal(modelo.metrica.dim)
    return z - (z @ G @ unitario) * unitario


def verificar_sanduiche_hessiana(
    modelo: EspacoModelo,
    n_amostras: Optional[int] = None,
    semente: Optional[int] = None,
    tolerancia: Optional[float] = None,
) -> RelatorioVerificacao:
    """b‖X‖² ≤ Hess F̄(X,X) ≤ a‖X‖² em pares (ponto, X ⊥ grad F̄) sorteados."""
    n_amostras = n_amostras or CONFIG.AMOSTRAS_VERIFICACAO
    semente = CONFIG.SEMENTE_PADRAO if semente is None else semente
    tolerancia = CONFIG.TOL_IDENTIDADE if tolerancia is None else tolerancia
    a, b = modelo.cota_superior, modelo.cota_inferior
    rng = np.random.default_rng(semente + 1)
    pontos = modelo.metrica.amostrar(n_amostras, semente)
    razoes, margens = [], []
    for p in pontos:
        razao = razao_sanduiche(modelo, p, vetor_ortogonal_aleatorio(modelo, p, rng))
        razoes.append(razao)
        margens.append(min(razao - b, a - razao))
    return RelatorioVerificacao.de_amostras("sanduiche_hessiana", razoes, margens, pontos, tolerancia, {'a': a, 'b': b})


def verificar_piso_laplaciano(
    modelo: EspacoModelo,
    n_amostras: Optional[int] = None,
    semente: Optional[int] = None,
) -> RelatorioVerificacao:
    """ΔF̄ ≥ (k−1)b − 1e−8 nos pontos amostrados."""
    n_amostras = n_amostras or CONFIG.AMOSTRAS_VERIFICACAO
    semente = CONFIG.SEMENTE_PADRAO if semente is None else semente
    piso = (modelo.k - 1) * modelo.cota_inferior
    pontos = modelo.metrica.amostrar(n_amostras, semente)
    valores = [laplaciano(modelo.busemann.campo, p) for p in pontos]
    margens = [v - piso for v in valores]
    return RelatorioVerificacao.de_amostras("piso_laplaciano", valores, margens, pontos, CONFIG.TOL_PISO, {'piso': piso})


def verificar_busemann(
    modelo: EspacoModelo,
    n_amostras: Optional[int] = None,
    semente: Optional[int] = None,
    tolerancia: float = 1e-8,
) -> RelatorioVerificacao:
    """‖grad F̄‖ = 1, Hess F̄(grad F̄, ·) = 0 e as fórmulas fechadas de Hess e Δ."""
    n_amostras = n_amostras or CONFIG.AMOSTRAS_VERIFICACAO
    semente = CONFIG.SEMENTE_PADRAO if semente is None else semente
    campo = modelo.busemann.campo
    pontos = modelo.metrica.amostrar(n_amostras, semente)
    erros = []
    for p in pontos:
        grad = gradiente(campo, p)
        H = hessiana(campo, p).componentes
        erro = max(
            abs(grad.norma(modelo.metrica) - 1.0),
            float(np.max(np.abs(H @ grad.componentes))),
            float(np.max(np.abs(H - modelo.hessiana_fechada(p)))),
            abs(float(np.trace(np.linalg.solve(modelo.metrica.componentes(p), H))) - modelo.laplaciano_fechado(p)),
        )
        erros.append(erro)
    return RelatorioVerificacao.de_amostras("formas_fechadas_busemann", erros, [-e for e in erros], pontos, tolerancia)


def amostrar_curvatura_seccional(
    metrica: MetricaCarta,
    n_planos: Optional[int] = None,
    semente: Optional[int] = None,
) -> np.ndarray:
    """Curvaturas seccionais em 2-planos aleatórios; linhas (K, ponto...)."""
    n_planos = n_planos or CONFIG.PLANOS_CURVATURA
    semente = CONFIG.SEMENTE_PADRAO if semente is None else semente
    rng = np.random.default_rng(semente + 2)
    pontos = metrica.amostrar(n_planos, semente)
    linhas = []
    for p in pontos:
        u, v = rng.standard_normal((2, metrica.dim))
        linhas.append(np.r_[curvatura_seccional(metrica, p, u, v), p])
    return np.array(linhas)


def verificar_curvatura_hiperbolica(
    modelo: ModeloHiperbolico,
    n_planos: Optional[int] = None,
    semente: Optional[int] = None,
    tolerancia: Optional[float] = None,
) -> RelatorioVerificacao:
    """K ≡ −a² nos planos sorteados (hipótese −a² ≤ K ≤ −b² com a = b)."""
    tolerancia = CONFIG.TOL_IDENTIDADE if tolerancia is None else tolerancia
    amostras = amostrar_curvatura_seccional(modelo.metrica, n_planos, semente)
    curvaturas = amostras[:, 0]
    alvo = -modelo.a ** 2
    return RelatorioVerificacao.de_amostras("curvatura_seccional", curvaturas, -np.abs(curvaturas - alvo),
                                            amostras[:, 1:], tolerancia, {'alvo': alvo})
