"""
Motor de geometria diferencial em cartas.

Toda variedade é representada por uma carta retangular com uma função de
componentes da métrica escrita em torch. As derivadas são exatas até o
arredondamento: `torch.func.jacfwd` aninhado faz o papel de aritmética
hiper-dual (segunda ordem em modo direto). Diferenças centrais com passo
h = 1e-4·(1+|p|) ficam disponíveis como oráculo independente.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
import torch
from torch.func import jacfwd, vmap
from scipy.stats import qmc, norm as normal_padrao

from configuracao import CONFIG
from erros import (
    ConjuntoAmostralVazio,
    FronteiraDominio,
    MetricaNaoPositivaDefinida,
)

DTYPE = torch.float64
FuncaoTorch = Callable[[torch.Tensor], torch.Tensor]


# ==============================
# CONVERSÕES E AUXILIARES TORCH
# ==============================

def para_tensor(p) -> torch.Tensor:
    return torch.as_tensor(np.asarray(p, dtype=float), dtype=DTYPE)


def para_numpy(t: torch.Tensor) -> np.ndarray:
    return np.array(t.detach().cpu().numpy(), dtype=float)


def constante_em(x: torch.Tensor, valor) -> torch.Tensor:
    """Constante que depende formalmente de x (mantém jacfwd bem definido)."""
    return torch.as_tensor(valor, dtype=DTYPE) + 0.0 * x.sum()


def bloco_diagonal(A: torch.Tensor, B: torch.Tensor) -> torch.Tensor:
    """[[A, 0], [0, B]] montado só com torch.cat (compatível com vmap/jacfwd)."""
    zero_ab = torch.zeros(A.shape[0], B.shape[1], dtype=DTYPE)
    zero_ba = torch.zeros(B.shape[0], A.shape[1], dtype=DTYPE)
    return torch.cat([
        torch.cat([A, zero_ab], dim=1),
        torch.cat([zero_ba, B], dim=1),
    ], dim=0)


def diagonal(entradas: Sequence[torch.Tensor]) -> torch.Tensor:
    return torch.diag_embed(torch.stack(list(entradas)))


# ==============================
# TIPOS
# ==============================

@dataclass(frozen=True, eq=False)
class MetricaCarta:
    """
    Carta coordenada de dimensão d com métrica suave.

    Attributes:
        dim: Dimensão da carta.
        funcao_metrica: x (tensor d) -> matriz d×d de componentes g_ij.
        limites: Caixa do domínio, array (d, 2).
        amostragem: Sub-caixa usada para sortear pontos (padrão: limites).
        nome: Rótulo para relatórios.
    """
    dim: int
    funcao_metrica: FuncaoTorch
    limites: np.ndarray
    amostragem: Optional[np.ndarray] = None
    nome: str = "carta"

    def __post_init__(self):
        limites = np.asarray(self.limites, dtype=float).reshape(self.dim, 2)
        object.__setattr__(self, 'limites', limites)
        caixa = limites if self.amostragem is None else np.asarray(self.amostragem, dtype=float).reshape(self.dim, 2)
        object.__setattr__(self, 'amostragem', caixa)

    def contem(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.limites[:, 0]) and np.all(p <= self.limites[:, 1]))

    def verificar_interior(self, p) -> None:
        """Rejeita pontos a menos de 2h da borda (h do oráculo de diferenças)."""
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise FronteiraDominio(f"{self.nome}: ponto com forma {p.shape}, esperado ({self.dim},)")
        margem = CONFIG.MARGEM_PASSOS * CONFIG.passo_fd(float(np.linalg.norm(p)))
        if np.any(p - self.limites[:, 0] < margem) or np.any(self.limites[:, 1] - p < margem):
            raise FronteiraDominio(f"{self.nome}: ponto {p} a menos de {margem:.2e} da borda")

    def avaliar(self, p) -> np.ndarray:
        return para_numpy(self.funcao_metrica(para_tensor(p)))

    def componentes(self, p) -> np.ndarray:
        """g_ij(p) validada (simétrica e positiva definida)."""
        return validar_metrica(self.avaliar(p), p, self.nome)

    def componentes_lote(self, pontos: np.ndarray) -> np.ndarray:
        return para_numpy(vmap(self.funcao_metrica)(para_tensor(pontos)))

    def produto_interno(self, p, u, v) -> float:
        return float(np.asarray(u) @ self.componentes(p) @ np.asarray(v))

    def norma(self, p, u) -> float:
        return float(np.sqrt(max(self.produto_interno(p, u, u), 0.0)))

    def amostrar(self, n: int, semente: int, quase_aleatorio: bool = False) -> np.ndarray:
        return amostrar_caixa(self.amostragem, n, semente, quase_aleatorio)


@dataclass(frozen=True, eq=False)
class CampoEscalar:
    """Função suave numa carta (Busemann, levantamentos, funções teste)."""
    carta: MetricaCarta
    funcao: FuncaoTorch
    nome: str = "F"

    def valor(self, p) -> float:
        return float(self.funcao(para_tensor(p)))

    def diferencial(self, p) -> np.ndarray:
        return para_numpy(jacfwd(self.funcao)(para_tensor(p)))

    def derivadas_coordenadas(self, p):
        """(∂_i F, ∂_i∂_j F) por jacfwd aninhado."""
        x = para_tensor(p)
        primeira = jacfwd(self.funcao)(x)
        segunda = jacfwd(jacfwd(self.funcao))(x)
        return para_numpy(primeira), para_numpy(segunda)


@dataclass(frozen=True, eq=False)
class VetorTangente:
    ponto: np.ndarray
    componentes: np.ndarray

    def norma(self, metrica: MetricaCarta) -> float:
        return metrica.norma(self.ponto, self.componentes)


@dataclass(frozen=True, eq=False)
class FormaSimetrica:
    """2-tensor covariante simétrico num ponto."""
    ponto: np.ndarray
    componentes: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.componentes, dtype=float)
        escala = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
        if c.size and np.max(np.abs(c - c.T)) > 1e3 * CONFIG.TOL_SIMETRIA * escala:
            raise ValueError("componentes da forma não são simétricas")
        object.__setattr__(self, 'componentes', 0.5 * (c + c.T))

    def avaliar(self, u, v) -> float:
        return float(np.asarray(u) @ self.componentes @ np.asarray(v))

    def traco(self, metrica: MetricaCarta) -> float:
        G = metrica.componentes(self.ponto)
        return float(np.trace(np.linalg.solve(G, self.componentes)))


class ValorAmostrado(NamedTuple):
    valor: float
    ponto: np.ndarray


# ==============================
# VALIDAÇÃO E AMOSTRAGEM
# ==============================

def validar_metrica(G: np.ndarray, p=None, nome: str = "carta") -> np.ndarray:
    escala = max(1.0, float(np.max(np.abs(G))))
    if np.max(np.abs(G - G.T)) > CONFIG.TOL_SIMETRIA * escala:
        raise MetricaNaoPositivaDefinida(f"{nome}: métrica não simétrica em {p}")
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        raise MetricaNaoPositivaDefinida(f"{nome}: métrica não positiva definida em {p}")
    return 0.5 * (G + G.T)


def amostrar_caixa(caixa: np.ndarray, n: int, semente: int, quase_aleatorio: bool = False) -> np.ndarray:
    """n pontos na caixa (d, 2): uniformes, ou Halton embaralhado se quase_aleatorio."""
    caixa = np.asarray(caixa, dtype=float)
    d = caixa.shape[0]
    if quase_aleatorio:
        unitarios = qmc.Halton(d=d, scramble=True, seed=semente).random(n)
    else:
        unitarios = np.random.default_rng(semente).random((n, d))
    return caixa[:, 0] + unitarios * (caixa[:, 1] - caixa[:, 0])


def fator_ortonormal(G: np.ndarray) -> np.ndarray:
    """E com Eᵀ G E = I (colunas formam base G-ortonormal)."""
    L = np.linalg.cholesky(G)
    return np.linalg.inv(L).T


def gram_schmidt(G: np.ndarray, vetores: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Ortonormaliza as colunas na métrica G, descartando as dependentes."""
    base: List[np.ndarray] = []
    for v in np.asarray(vetores, dtype=float).T:
        w = v.copy()
        for e in base:
            w = w - (e @ G @ w) * e
        comprimento = np.sqrt(max(w @ G @ w, 0.0))
        if comprimento > tol * max(1.0, np.sqrt(abs(v @ G @ v))):
            base.append(w / comprimento)
    if not base:
        return np.zeros((G.shape[0], 0))
    return np.stack(base, axis=1)


# ==============================
# CHRISTOFFEL E CURVATURA
# ==============================

def christoffel_t(funcao_metrica: FuncaoTorch, x: torch.Tensor) -> torch.Tensor:
    G = funcao_metrica(x)
    dG = jacfwd(funcao_metrica)(x)  # dG[i, j, k] = ∂_k g_ij
    termos = (torch.einsum('jli->lij', dG)
              + torch.einsum('ilj->lij', dG)
              - torch.einsum('ijl->lij', dG))
    return 0.5 * torch.einsum('kl,lij->kij', torch.linalg.inv(G), termos)


def christoffel(metrica: MetricaCarta, p) -> np.ndarray:
    """Γ^k_ij em p, array (k, i, j)."""
    metrica.verificar_interior(p)
    metrica.componentes(p)
    return para_numpy(christoffel_t(metrica.funcao_metrica, para_tensor(p)))


def christoffel_lote(metrica: MetricaCarta, pontos: np.ndarray) -> np.ndarray:
    funcao = lambda x: christoffel_t(metrica.funcao_metrica, x)
    return para_numpy(vmap(funcao)(para_tensor(pontos)))


def residuo_compatibilidade(metrica: MetricaCarta, p) -> float:
    """max |∂_k g_ij − Γ^l_ki g_lj − Γ^l_kj g_il|."""
    x = para_tensor(p)
    G = metrica.componentes(p)
    dG = para_numpy(jacfwd(metrica.funcao_metrica)(x))
    gamma = christoffel(metrica, p)
    residuo = (np.einsum('ijk->kij', dG)
               - np.einsum('lki,lj->kij', gamma, G)
               - np.einsum('lkj,il->kij', gamma, G))
    return float(np.max(np.abs(residuo)))


def riemann_t(funcao_metrica: FuncaoTorch, x: torch.Tensor) -> torch.Tensor:
    """R^l_ijk com R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l."""
    gamma = christoffel_t(funcao_metrica, x)
    d_gamma = jacfwd(lambda y: christoffel_t(funcao_metrica, y))(x)  # [l, j, k, i] = ∂_i Γ^l_jk
    derivada = torch.einsum('ljki->lijk', d_gamma)
    return (derivada - derivada.permute(0, 2, 1, 3)
            + torch.einsum('lim,mjk->lijk', gamma, gamma)
            - torch.einsum('ljm,mik->lijk', gamma, gamma))


def curvatura_seccional(metrica: MetricaCarta, p, u, v) -> float:
    """K(u, v) = ⟨R(u,v)v, u⟩ / (|u|²|v|² − ⟨u,v⟩²)."""
    metrica.verificar_interior(p)
    G = metrica.componentes(p)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    R = para_numpy(riemann_t(metrica.funcao_metrica, para_tensor(p)))
    ruvv = np.einsum('lijk,i,j,k->l', R, u, v, v)
    area = (u @ G @ u) * (v @ G @ v) - (u @ G @ v) ** 2
    if area <= 1e-14 * max(1.0, (u @ G @ u) * (v @ G @ v)):
        raise ValueError("u e v não geram um 2-plano")
    return float(ruvv @ G @ u / area)


# ==============================
# CÁLCULO SOBRE CAMPOS
# ==============================

def gradiente(campo: CampoEscalar, p) -> VetorTangente:
    """grad F = g^{ij} ∂_j F."""
    carta = campo.carta
    carta.verificar_interior(p)
    G = carta.componentes(p)
    return VetorTangente(np.asarray(p, dtype=float), np.linalg.solve(G, campo.diferencial(p)))


def hessiana(campo: CampoEscalar, p) -> FormaSimetrica:
    """Hess F_ij = ∂_i∂_j F − Γ^k_ij ∂_k F."""
    primeira, segunda = campo.derivadas_coordenadas(p)
    gamma = christoffel(campo.carta, p)
    return FormaSimetrica(np.asarray(p, dtype=float), segunda - np.einsum('kij,k->ij', gamma, primeira))


def laplaciano(campo: CampoEscalar, p) -> float:
    """Traço da Hessiana em relação a g."""
    return hessiana(campo, p).traco(campo.carta)


def laplaciano_divergencia(campo: CampoEscalar, p) -> float:
    """(1/√det g) ∂_i(√det g · g^{ij} ∂_j F): caminho independente da Hessiana."""
    carta = campo.carta
    carta.verificar_interior(p)
    G = carta.componentes(p)

    def fluxo(x):
        Gx = carta.funcao_metrica(x)
        return torch.sqrt(torch.linalg.det(Gx)) * torch.linalg.solve(Gx, jacfwd(campo.funcao)(x))

    J = para_numpy(jacfwd(fluxo)(para_tensor(p)))
    return float(np.trace(J) / np.sqrt(np.linalg.det(G)))


def derivada_covariante(metrica: MetricaCarta, p, campo_vetorial: FuncaoTorch, v) -> np.ndarray:
    """∇_v Y = dY(v) + Γ(v, Y)."""
    x = para_tensor(p)
    J = para_numpy(jacfwd(campo_vetorial)(x))
    Y = para_numpy(campo_vetorial(x))
    gamma = christoffel(metrica, p)
    v = np.asarray(v, dtype=float)
    return J @ v + np.einsum('kij,i,j->k', gamma, v, Y)


def divergencia(metrica: MetricaCarta, p, campo_vetorial: FuncaoTorch) -> float:
    x = para_tensor(p)
    J = para_numpy(jacfwd(campo_vetorial)(x))
    Y = para_numpy(campo_vetorial(x))
    gamma = christoffel(metrica, p)
    return float(np.trace(J) + np.einsum('iij,j->', gamma, Y))


def colchete(campo_x: FuncaoTorch, campo_y: FuncaoTorch, p) -> np.ndarray:
    """[X, Y] = dY(X) − dX(Y) em coordenadas."""
    x = para_tensor(p)
    return para_numpy(jacfwd(campo_y)(x) @ campo_x(x) - jacfwd(campo_x)(x) @ campo_y(x))


# ==============================
# ORÁCULO DE DIFERENÇAS CENTRAIS
# ==============================

def _avaliador_numpy(funcao: FuncaoTorch):
    return lambda q: para_numpy(funcao(para_tensor(q)))


def jacobiano_fd(funcao: FuncaoTorch, p, h: Optional[float] = None) -> np.ndarray:
    """Derivadas centrais; o índice de derivação fica por último."""
    p = np.asarray(p, dtype=float)
    h = h or CONFIG.passo_fd(float(np.linalg.norm(p)))
    f = _avaliador_numpy(funcao)
    colunas = []
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = h
        colunas.append((f(p + e) - f(p - e)) / (2.0 * h))
    return np.stack(colunas, axis=-1)


def hessiana_coordenadas_fd(funcao: FuncaoTorch, p, h: Optional[float] = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    h = h or CONFIG.passo_fd(float(np.linalg.norm(p)))
    f = _avaliador_numpy(funcao)
    d = p.size
    H = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            ei = np.zeros(d)
            ej = np.zeros(d)
            ei[i] = h
            ej[j] = h
            H[i, j] = (f(p + ei + ej) - f(p + ei - ej) - f(p - ei + ej) + f(p - ei - ej)) / (4.0 * h * h)
            H[j, i] = H[i, j]
    return H


def christoffel_fd(metrica: MetricaCarta, p) -> np.ndarray:
    metrica.verificar_interior(p)
    G = metrica.componentes(p)
    dG = jacobiano_fd(metrica.funcao_metrica, p)
    termos = np.einsum('jli->lij', dG) + np.einsum('ilj->lij', dG) - np.einsum('ijl->lij', dG)
    return 0.5 * np.einsum('kl,lij->kij', np.linalg.inv(G), termos)


def hessiana_fd(campo: CampoEscalar, p) -> np.ndarray:
    primeira = jacobiano_fd(campo.funcao, p)
    segunda = hessiana_coordenadas_fd(campo.funcao, p)
    return segunda - np.einsum('kij,k->ij', christoffel_fd(campo.carta, p), primeira)


# ==============================
# NORMAS
# ==============================

def norma_sup(amostrador: Callable[[np.ndarray], float], pontos: Iterable) -> ValorAmostrado:
    """Máximo amostral e o ponto que o atinge."""
    pontos = [np.asarray(q, dtype=float) for q in pontos]
    if not pontos:
        raise ConjuntoAmostralVazio("conjunto amostral vazio")
    valores = np.array([float(amostrador(q)) for q in pontos])
    i = int(np.argmax(valores))
    return ValorAmostrado(float(valores[i]), pontos[i])


def norma_inf(amostrador: Callable[[np.ndarray], float], pontos: Iterable) -> ValorAmostrado:
    pontos = [np.asarray(q, dtype=float) for q in pontos]
    if not pontos:
        raise ConjuntoAmostralVazio("conjunto amostral vazio")
    valores = np.array([float(amostrador(q)) for q in pontos])
    i = int(np.argmin(valores))
    return ValorAmostrado(float(valores[i]), pontos[i])


@lru_cache(maxsize=32)
def _direcoes(dim: int, n: int) -> np.ndarray:
    if dim == 1:
        return np.ones((1, 1))
    i = np.arange(n)
    if dim == 2:
        theta = 2.0 * np.pi * i / n
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if dim == 3:
        # esfera de Fibonacci
        z = 1.0 - 2.0 * (i + 0.5) / n
        raio = np.sqrt(1.0 - z * z)
        phi = i * np.pi * (3.0 - np.sqrt(5.0))
        return np.stack([raio * np.cos(phi), raio * np.sin(phi), z], axis=1)
    gauss = normal_padrao.ppf(qmc.Halton(d=dim, scramble=True, seed=dim).random(n))
    return gauss / np.linalg.norm(gauss, axis=1, keepdims=True)


def direcoes_unitarias(dim: int, n: Optional[int] = None) -> np.ndarray:
    """Direções unitárias determinísticas em ℝ^dim."""
    return _direcoes(dim, n or CONFIG.DIRECOES_POR_SLOT).copy()


def _normalizar(v: np.ndarray, anterior: np.ndarray) -> np.ndarray:
    comprimento = np.linalg.norm(v)
    return anterior if comprimento < 1e-300 else v / comprimento


def norma_bilinear(B: np.ndarray, passos: Optional[int] = None) -> float:
    """
    sup ‖B(u, v)‖ sobre pares unitários, com B dado numa base ortonormal.

    B tem forma (q, r, o): B(u, v) = Σ u_i v_j B[i, j, :]. Amostra as
    direções determinísticas em cada slot e refina os melhores pares por
    subida de gradiente projetada na esfera.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 3 or 0 in B.shape:
        return 0.0
    passos = CONFIG.PASSOS_SUBIDA if passos is None else passos
    U = direcoes_unitarias(B.shape[0])
    V = direcoes_unitarias(B.shape[1])
    normas = np.linalg.norm(np.einsum('ai,bj,ijo->abo', U, V, B, optimize=True), axis=-1)
    melhor = float(normas.max())
    for indice in np.argsort(normas, axis=None)[-4:]:
        a, b = np.unravel_index(indice, normas.shape)
        u, v = U[a].copy(), V[b].copy()
        for _ in range(passos):
            Mv = np.einsum('ijo,j->oi', B, v)
            u = _normalizar(Mv.T @ (Mv @ u), u)
            Mu = np.einsum('ijo,i->oj', B, u)
            v = _normalizar(Mu.T @ (Mu @ v), v)
        melhor = max(melhor, float(np.linalg.norm(np.einsum('i,j,ijo->o', u, v, B))))
    return melhor


# ==============================
# CARTAS BÁSICAS
# ==============================

def carta_euclidiana(dim: int, limite: float = 10.0, escala: float = 1.0, nome: str = "euclidiana") -> MetricaCarta:
    """ℝ^dim com métrica escala²·δ."""
    def metrica(x):
        return constante_em(x, (escala ** 2) * torch.eye(dim, dtype=DTYPE))

    caixa = [[-limite, limite]] * dim
    amostragem = [[-min(limite, CONFIG.CAIXA_AMOSTRAGEM), min(limite, CONFIG.CAIXA_AMOSTRAGEM)]] * dim
    return MetricaCarta(dim, metrica, np.array(caixa), np.array(amostragem), nome)


def carta_esfera(raio: float = 1.0, nome: str = "esfera") -> MetricaCarta:
    """S²(raio) em coordenadas (θ, φ); os polos ficam fora da carta."""
    def metrica(x):
        r2 = raio ** 2
        return diagonal([constante_em(x, r2), r2 * torch.sin(x[0]) ** 2])

    limites = np.array([[0.05, np.pi - 0.05], [-np.pi, np.pi]])
    amostragem = np.array([[0.3, np.pi - 0.3], [-2.0, 2.0]])
    return MetricaCarta(2, metrica, limites, amostragem, nome)


def carta_circulo(raio: float = 1.0, nome: str = "circulo") -> MetricaCarta:
    """S¹(raio) na carta angular."""
    def metrica(x):
        return constante_em(x, (raio ** 2) * torch.eye(1, dtype=DTYPE))

    return MetricaCarta(1, metrica, np.array([[-np.pi, np.pi]]), np.array([[-2.5, 2.5]]), nome)
