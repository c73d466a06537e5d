import numpy as np
import pytest
import torch

from cenario import (
    analisar_expressao,
    carregar_cenario,
    compilar_numpy,
    compilar_torch,
    e_hiperbolico,
    exigir,
    montar,
)
from erros import CenarioNaoSuportado, DerivadaNaoPositiva, ErroConfiguracao
from geometria import DTYPE


def _escrever(tmp_path, texto, nome="cenario.toml"):
    caminho = tmp_path / nome
    caminho.write_text(texto, encoding="utf-8")
    return caminho


def test_cenarios_distribuidos_sao_validos(cenarios):
    arquivos = sorted(cenarios.glob("*.toml"))
    assert len(arquivos) >= 10
    for arquivo in arquivos:
        cenario, sha = carregar_cenario(arquivo)
        assert cenario.nome == arquivo.stem
        assert len(sha) == 64


def test_hash_estavel(cenarios):
    _, a = carregar_cenario(cenarios / "curva_h2.toml")
    _, b = carregar_cenario(cenarios / "curva_h2.toml")
    assert a == b


def test_toml_malformado_informa_linha(tmp_path):
    caminho = _escrever(tmp_path, 'nome = "x"\n[base\ntipo = "hiperbolico"\n')
    with pytest.raises(ErroConfiguracao) as erro:
        carregar_cenario(caminho)
    assert erro.value.linha == 2


def test_arquivo_ausente(tmp_path):
    with pytest.raises(ErroConfiguracao):
        carregar_cenario(tmp_path / "nao_existe.toml")


def test_campo_desconhecido(tmp_path):
    caminho = _escrever(tmp_path, 'nome = "x"\n[base]\ntipo = "hiperbolico"\ncurvatura = 3\n')
    with pytest.raises(ErroConfiguracao, match="curvatura"):
        carregar_cenario(caminho)


def test_dimensoes_inconsistentes(tmp_path):
    texto = """
nome = "x"
[base]
tipo = "hiperbolico"
k = 3
[total]
tipo = "identidade"
[imersao]
tipo = "totalmente_geodesica"
m = 4
"""
    with pytest.raises(ErroConfiguracao, match="dim M"):
        carregar_cenario(_escrever(tmp_path, texto))


def test_hopf_exige_base_hopf(tmp_path):
    texto = 'nome = "x"\n[base]\ntipo = "hiperbolico"\n[total]\ntipo = "hopf"\n'
    with pytest.raises(ErroConfiguracao, match="hopf"):
        carregar_cenario(_escrever(tmp_path, texto))


def test_expressao_com_simbolo_desconhecido(tmp_path):
    texto = 'nome = "x"\n[base]\ntipo = "linha_warped"\nw = "s + t"\n'
    with pytest.raises(ErroConfiguracao, match="desconhecidos"):
        carregar_cenario(_escrever(tmp_path, texto))


def test_raios_fora_de_ordem(tmp_path):
    texto = 'nome = "x"\n[espectral]\nraios = [2.0, 1.0]\n'
    with pytest.raises(ErroConfiguracao, match="crescente"):
        carregar_cenario(_escrever(tmp_path, texto))


@pytest.mark.parametrize("texto", ["s +", "foo(s)", "__import__('os')", "s.real"])
def test_expressoes_rejeitadas(texto):
    with pytest.raises(ErroConfiguracao):
        analisar_expressao(texto, ["s"])


def test_compilar_torch_diferenciavel():
    w = compilar_torch("s + 0.1*sin(s)", ["s"])
    s = torch.tensor(0.3, dtype=DTYPE)
    assert float(w(s)) == pytest.approx(0.3 + 0.1 * np.sin(0.3))
    assert float(torch.func.jacfwd(w)(s)) == pytest.approx(1.0 + 0.1 * np.cos(0.3))


def test_compilar_torch_varias_variaveis_e_constante():
    rho = compilar_torch("exp(x1/2)*cosh(s) + pi", ["x1", "s"])
    x = torch.tensor([0.4, 0.2], dtype=DTYPE)
    assert float(rho(x)) == pytest.approx(np.exp(0.2) * np.cosh(0.2) + np.pi)
    constante = compilar_torch("2", ["x1", "s"])
    assert float(constante(x)) == 2.0
    assert torch.func.jacfwd(constante)(x).shape == (2,)


def test_compilar_numpy_vetorizado():
    S = compilar_numpy("sinh(rho)**2", "rho")
    rho = np.linspace(0.1, 1.0, 5)
    assert np.allclose(S(rho), np.sinh(rho) ** 2)
    assert compilar_numpy("1", "rho")(rho).shape == rho.shape


def test_montar_produto(cenarios):
    cenario, _ = carregar_cenario(cenarios / "produto_h2_r.toml")
    montagem = montar(cenario)
    assert e_hiperbolico(montagem.modelo)
    assert (montagem.submersao.n, montagem.submersao.k, montagem.imersao.m) == (3, 2, 2)
    assert cenario.nomes_total() == ["x1", "s", "y1"]


def test_montar_hopf(cenarios):
    cenario, _ = carregar_cenario(cenarios / "hopf.toml")
    montagem = montar(cenario)
    assert montagem.modelo is None
    assert montagem.submersao.nome == "hopf"
    with pytest.raises(CenarioNaoSuportado):
        exigir(montagem, "modelo", "imersao")


def test_w_negativo_valida_mas_nao_monta(cenarios):
    cenario, _ = carregar_cenario(cenarios / "w_negativo.toml")
    with pytest.raises(ErroConfiguracao, match="DerivadaNaoPositiva") as erro:
        montar(cenario)
    assert isinstance(erro.value.__cause__, DerivadaNaoPositiva)
