"""
Imersões isométricas f: M^m → M̃^n.

A carta de M carrega a métrica induzida Jᵀ g̃ J, escrita em torch para que o
Laplaciano intrínseco de M seja calculado na própria carta de M. A identidade
de restrição

    Δ̃F̃ = ΔF + Σ Hess F̃(N_i, N_i) − ⟨grad F̃, H⟩

é então conferida por dois caminhos independentes.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import torch
from scipy.linalg import qr
from scipy.stats import ortho_group
from torch.func import jacfwd

from configuracao import CONFIG
from erros import DimensaoInvalida, PostoDeficiente
from geometria import (
    DTYPE,
    CampoEscalar,
    FormaSimetrica,
    FuncaoTorch,
    MetricaCarta,
    VetorTangente,
    carta_euclidiana,
    christoffel,
    constante_em,
    gradiente,
    hessiana,
    laplaciano,
    para_numpy,
    para_tensor,
)


@dataclass(frozen=True, eq=False)
class MapaImersao:
    nome: str
    carta_fonte: MetricaCarta
    alvo: MetricaCarta
    mapa: FuncaoTorch

    @property
    def m(self) -> int:
        return self.carta_fonte.dim

    @property
    def n(self) -> int:
        return self.alvo.dim

    def imagem(self, p) -> np.ndarray:
        return para_numpy(self.mapa(para_tensor(p)))

    def jacobiano(self, p) -> np.ndarray:
        return para_numpy(jacfwd(self.mapa)(para_tensor(p)))


@dataclass(frozen=True, eq=False)
class ReferencialNormal:
    ponto: np.ndarray
    vetores: List[VetorTangente]

    def matriz(self) -> np.ndarray:
        """Colunas N_i em coordenadas do alvo."""
        if not self.vetores:
            return np.zeros((self.ponto.size, 0))
        return np.stack([v.componentes for v in self.vetores], axis=1)


@dataclass(frozen=True, eq=False)
class ValorCurvaturaMedia:
    ponto: np.ndarray
    vetor: VetorTangente
    norma: float


@dataclass(frozen=True, eq=False)
class SegundaForma:
    """α(∂_a, ∂_b) como vetores normais em coordenadas do alvo, forma (m, m, n)."""
    ponto: np.ndarray
    componentes: np.ndarray

    def avaliar(self, u, v) -> np.ndarray:
        return np.einsum('a,b,abk->k', np.asarray(u), np.asarray(v), self.componentes)


def criar_imersao(
    nome: str,
    alvo: MetricaCarta,
    mapa: FuncaoTorch,
    limites_fonte: np.ndarray,
    amostragem_fonte: Optional[np.ndarray] = None,
) -> MapaImersao:
    """Monta a imersão; a carta fonte recebe a métrica induzida Jᵀ g̃ J."""
    limites_fonte = np.asarray(limites_fonte, dtype=float)
    m = limites_fonte.shape[0]
    if m > alvo.dim:
        raise DimensaoInvalida(f"dim M = {m} > dim M̃ = {alvo.dim}")

    def metrica_induzida_t(u):
        J = jacfwd(mapa)(u)
        return J.T @ alvo.funcao_metrica(mapa(u)) @ J

    fonte = MetricaCarta(m, metrica_induzida_t, limites_fonte, amostragem_fonte, f"{nome}:fonte")
    return MapaImersao(nome, fonte, alvo, mapa)


def _verificar_posto(f: MapaImersao, p) -> np.ndarray:
    J = f.jacobiano(p)
    if np.linalg.matrix_rank(J, tol=1e-10 * max(1.0, np.abs(J).max())) < f.m:
        raise PostoDeficiente(f"{f.nome}: diferencial com posto < {f.m} em {p}")
    return J


def metrica_induzida(f: MapaImersao, p) -> FormaSimetrica:
    J = _verificar_posto(f, p)
    G = f.alvo.componentes(f.imagem(p))
    return FormaSimetrica(np.asarray(p, dtype=float), J.T @ G @ J)


def referencial_normal(f: MapaImersao, p, rotacao: Optional[np.ndarray] = None) -> ReferencialNormal:
    """
    Referencial g̃-ortonormal do fibrado normal em f(p).

    Em coordenadas g̃-ortonormais (via Cholesky) a fatoração QR completa de
    LᵀJ separa o espaço tangente (primeiras m colunas de Q) do seu
    complemento. `rotacao` aplica uma mudança ortogonal opcional.
    """
    J = _verificar_posto(f, p)
    q = f.imagem(p)
    G = f.alvo.componentes(q)
    L = np.linalg.cholesky(G)
    Q, _ = qr(L.T @ J, mode='full')
    complemento = Q[:, f.m:]
    if rotacao is not None:
        complemento = complemento @ rotacao
    normais = np.linalg.solve(L.T, complemento)
    return ReferencialNormal(q, [VetorTangente(q, normais[:, i]) for i in range(normais.shape[1])])


def _projetor_normal(J: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Projeção g̃-ortogonal sobre o espaço normal."""
    return np.eye(G.shape[0]) - J @ np.linalg.solve(J.T @ G @ J, J.T @ G)


def segunda_forma_fundamental(f: MapaImersao, p) -> SegundaForma:
    """α(X,Y) = parte normal de ∇̃_{df X} df Y."""
    J = _verificar_posto(f, p)
    x = para_tensor(p)
    segunda = para_numpy(jacfwd(jacfwd(f.mapa))(x))  # [k, a, b] = ∂_a∂_b f^k
    q = f.imagem(p)
    f.alvo.verificar_interior(q)
    G = f.alvo.componentes(q)
    gamma = christoffel(f.alvo, q)
    derivada = np.einsum('kab->abk', segunda) + np.einsum('kij,ia,jb->abk', gamma, J, J)
    alpha = np.einsum('kl,abl->abk', _projetor_normal(J, G), derivada)
    alpha = 0.5 * (alpha + np.swapaxes(alpha, 0, 1))
    return SegundaForma(np.asarray(p, dtype=float), alpha)


def curvatura_media(f: MapaImersao, p) -> ValorCurvaturaMedia:
    """H = tr_g α (não normalizada)."""
    alpha = segunda_forma_fundamental(f, p)
    g = metrica_induzida(f, p).componentes
    H = np.einsum('ab,abk->k', np.linalg.inv(g), alpha.componentes)
    q = f.imagem(p)
    vetor = VetorTangente(q, H)
    return ValorCurvaturaMedia(np.asarray(p, dtype=float), vetor, vetor.norma(f.alvo))


def termos_gulliver(
    f: MapaImersao,
    campo_alvo: CampoEscalar,
    p,
    rotacao: Optional[np.ndarray] = None,
) -> Dict[str, float]:
    """Cada termo da identidade de restrição avaliado separadamente."""
    q = f.imagem(p)
    restricao = CampoEscalar(f.carta_fonte, lambda u: campo_alvo.funcao(f.mapa(u)), "restricao")
    hess = hessiana(campo_alvo, q)
    normais = referencial_normal(f, p, rotacao)
    soma_normal = sum(hess.avaliar(N.componentes, N.componentes) for N in normais.vetores)
    H = curvatura_media(f, p).vetor.componentes
    return {
        'laplaciano_ambiente': laplaciano(campo_alvo, q),
        'laplaciano_intrinseco': laplaciano(restricao, p),
        'hessiana_normal': float(soma_normal),
        'derivada_H': float(campo_alvo.diferencial(q) @ H),
    }


def residuo_gulliver(
    f: MapaImersao,
    campo_alvo: CampoEscalar,
    p,
    rotacao: Optional[np.ndarray] = None,
) -> float:
    """|Δ̃F̃ − (ΔF + Σ Hess F̃(N_i,N_i) − H(F̃))|, com H(F̃) = ⟨grad F̃, H⟩."""
    t = termos_gulliver(f, campo_alvo, p, rotacao)
    return abs(t['laplaciano_ambiente']
               - (t['laplaciano_intrinseco'] + t['hessiana_normal'] - t['derivada_H']))


def rotacao_normal_aleatoria(f: MapaImersao, semente: int) -> np.ndarray:
    codim = f.n - f.m
    if codim == 0:
        return np.zeros((0, 0))
    if codim == 1:
        return -np.ones((1, 1))
    return ortho_group.rvs(codim, random_state=semente)


# ==============================
# IMERSÕES PRONTAS
# ==============================

def _caixa(dim: int, meia_largura: float) -> np.ndarray:
    return np.array([[-meia_largura, meia_largura]] * dim)


def imersao_identidade(alvo: MetricaCarta) -> MapaImersao:
    return criar_imersao("identidade", alvo, lambda u: u, alvo.limites, alvo.amostragem)


def imersao_fatia(alvo: MetricaCarta, dim_base: int, valor_fibra: float = 0.0) -> MapaImersao:
    """Fatia B × {y₀} de um produto (warped ou não) com coordenadas da base primeiro."""
    codim = alvo.dim - dim_base

    def mapa(u):
        return torch.cat([u, constante_em(u, valor_fibra) * torch.ones(codim, dtype=DTYPE)])

    return criar_imersao("fatia", alvo, mapa, alvo.limites[:dim_base], alvo.amostragem[:dim_base])


def imersao_horosfera(alvo: MetricaCarta, s0: float = 0.0) -> MapaImersao:
    """Horosfera {s = s₀} na carta horosférica de ℍ^n."""
    n = alvo.dim

    def mapa(u):
        return torch.cat([u, constante_em(u, s0).reshape(1)])

    caixa = CONFIG.CAIXA_AMOSTRAGEM
    return criar_imersao("horosfera", alvo, mapa, alvo.limites[:n - 1], _caixa(n - 1, caixa))


def imersao_totalmente_geodesica(alvo: MetricaCarta, m: int) -> MapaImersao:
    """ℍ^m ⊂ ℍ^n: (x_1..x_{m−1}, s) ↦ (x_1..x_{m−1}, 0, ..., 0, s)."""
    n = alvo.dim
    if not 2 <= m <= n:
        raise DimensaoInvalida(f"m = {m} fora de [2, {n}]")

    def mapa(u):
        zeros = constante_em(u, 0.0) * torch.ones(n - m, dtype=DTYPE)
        return torch.cat([u[:-1], zeros, u[-1:]])

    limites = np.vstack([alvo.limites[:m - 1], alvo.limites[-1:]])
    amostragem = np.vstack([alvo.amostragem[:m - 1], alvo.amostragem[-1:]])
    return criar_imersao("totalmente_geodesica", alvo, mapa, limites, amostragem)


def imersao_grafico(alvo: MetricaCarta, altura: FuncaoTorch) -> MapaImersao:
    """Gráfico u ↦ (u, h(u)) de uma função sobre as primeiras n−1 coordenadas."""
    n = alvo.dim

    def mapa(u):
        return torch.cat([u, altura(u).reshape(1)])

    return criar_imersao("grafico", alvo, mapa, alvo.limites[:n - 1], alvo.amostragem[:n - 1])


def imersao_circulo(raio: float) -> MapaImersao:
    """Círculo de raio r em ℝ² pela carta angular."""
    alvo = carta_euclidiana(2, limite=10.0 * max(1.0, raio))

    def mapa(u):
        return torch.stack([raio * torch.cos(u[0]), raio * torch.sin(u[0])])

    return criar_imersao("circulo", alvo, mapa, np.array([[-np.pi, np.pi]]), np.array([[-2.5, 2.5]]))
