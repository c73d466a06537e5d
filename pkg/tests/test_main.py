import json

import pytest
from scipy.special import jn_zeros

import orquestrador
from erros import FronteiraDominio
from main import main, parse_arguments
from orquestrador import CODIGO_CONFIGURACAO, CODIGO_FALHA, CODIGO_OK, ler_curva


def _executar(cenarios, comando, arquivo, saida, *extras):
    return main([comando, str(cenarios / arquivo), '--out', str(saida), *extras])


def _json(caminho):
    with open(caminho, encoding='utf-8') as f:
        return json.load(f)


def test_argumentos_invalidos():
    with pytest.raises(SystemExit):
        parse_arguments(['verify', 'x.toml', '--samples', '0'])
    with pytest.raises(SystemExit):
        parse_arguments(['desenhar', 'x.toml'])


def test_eigen_grava_csv_deterministico(cenarios, tmp_path):
    assert _executar(cenarios, 'eigen', 'curva_h2.toml', tmp_path) == CODIGO_OK
    caminho = tmp_path / "curva_h2_lambda1.csv"
    linhas = caminho.read_text(encoding='utf-8').splitlines()
    assert linhas[0].startswith("# cenario=curva_h2 sha256=")
    assert linhas[1] == "r,lambda1,mesh_parameter,error_estimate"
    assert len(linhas) == 6
    primeira = caminho.read_bytes()

    assert _executar(cenarios, 'eigen', 'curva_h2.toml', tmp_path) == CODIGO_OK
    assert caminho.read_bytes() == primeira

    curva = ler_curva(str(caminho))
    assert [p.r for p in curva] == [4.0, 6.0, 8.0, 10.0]
    assert all(p.lambda1 > 0.25 for p in curva)
    espectral = _json(tmp_path / "curva_h2_espectral.json")
    assert espectral['cenario']['nome'] == "curva_h2"
    assert len(espectral['cenario']['sha256']) == 64


def test_eigen_disco_fem(cenarios, tmp_path):
    assert _executar(cenarios, 'eigen', 'disco_plano.toml', tmp_path) == CODIGO_OK
    curva = ler_curva(str(tmp_path / "disco_plano_lambda1.csv"))
    assert curva[0].lambda1 == pytest.approx(jn_zeros(0, 1)[0] ** 2, rel=1e-2)


def test_arquivo_inexistente(tmp_path):
    assert main(['verify', str(tmp_path / "nada.toml"), '--out', str(tmp_path)]) == CODIGO_CONFIGURACAO


def test_toml_malformado(tmp_path):
    caminho = tmp_path / "ruim.toml"
    caminho.write_text('nome = "ruim"\n[base\n', encoding='utf-8')
    assert main(['verify', str(caminho), '--out', str(tmp_path)]) == CODIGO_CONFIGURACAO


def test_hipotese_w_violada(cenarios, tmp_path):
    assert _executar(cenarios, 'verify', 'w_negativo.toml', tmp_path) == CODIGO_CONFIGURACAO


def test_verify_sem_geometria(cenarios, tmp_path):
    assert _executar(cenarios, 'verify', 'disco_plano.toml', tmp_path) == CODIGO_CONFIGURACAO


def test_bound_horosfera_nao_aplicavel(cenarios, tmp_path):
    assert _executar(cenarios, 'bound', 'horosfera_h3.toml', tmp_path, '--samples', '20') == CODIGO_OK
    limite = _json(tmp_path / "horosfera_h3_limite.json")
    assert limite['veredito'] == "NAO_APLICAVEL"
    assert limite['c'] == pytest.approx(-1.0, abs=1e-6)
    assert limite['limite'] is None


def test_report_cheung_leung(cenarios, tmp_path):
    assert _executar(cenarios, 'report', 'cheung_leung_h2_h3.toml', tmp_path, '--samples', '30') == CODIGO_OK
    limite = _json(tmp_path / "cheung_leung_h2_h3_limite.json")
    assert limite['veredito'] == "PASSOU"
    assert limite['limite'] == pytest.approx(0.25, abs=1e-6)
    assert limite['arquivo_curva'] == "cheung_leung_h2_h3_lambda1.csv"
    relatorio = _json(tmp_path / "cheung_leung_h2_h3_relatorio.json")
    assert relatorio['codigo_saida'] == 0
    assert relatorio['verificacao_passou']
    assert "cheung_leung_h2_h3_verificacao.json" in relatorio['arquivos']


def test_verify_hopf(cenarios, tmp_path):
    assert _executar(cenarios, 'verify', 'hopf.toml', tmp_path, '--samples', '10', '--seed', '3') == CODIGO_OK
    verificacao = _json(tmp_path / "hopf_verificacao.json")
    assert verificacao['passou']
    nomes = {v['nome'] for v in verificacao['verificacoes']}
    assert "hopf_norma_A" in nomes


def test_bound_hopf_sem_modelo(cenarios, tmp_path):
    assert _executar(cenarios, 'bound', 'hopf.toml', tmp_path) == CODIGO_CONFIGURACAO


def _classicos(limite):
    return {c['nome']: c for c in limite['limites_classicos']}


@pytest.mark.parametrize("arquivo", ["h4_r_fatia.toml", "exemplo_warped.toml"])
def test_bound_classicos_exigem_curvatura_ambiente(cenarios, tmp_path, arquivo):
    assert _executar(cenarios, 'bound', arquivo, tmp_path, '--samples', '20') == CODIGO_OK
    limite = _json(tmp_path / arquivo.replace(".toml", "_limite.json"))
    classicos = _classicos(limite)
    for nome in ("Castillon", "Cheung–Leung"):
        assert classicos[nome]['aplicavel'] is False
        assert classicos[nome]['valor'] is None
        assert "K̄ amostrada" in classicos[nome]['hipotese']


CHEUNG_LEUNG_COM_CURVA_EUCLIDIANA = """
nome = "cheung_leung_corrompido"

[base]
tipo = "hiperbolico"
k = 3

[total]
tipo = "identidade"

[imersao]
tipo = "totalmente_geodesica"
m = 2
alpha = 0.0

[amostragem]
verificacao = 10
constante_c = 20

[espectral]
metodo = "radial"
modelo = "euclidiano"
dim = 2
raios = [6.0, 8.0]
"""


def test_bound_falha_com_curva_abaixo_do_limite(tmp_path):
    # λ₁ de discos planos (j₀₁²/r² < 1/4) contra c = 1 de ℍ² ⊂ ℍ³
    caminho = tmp_path / "cheung_leung_corrompido.toml"
    caminho.write_text(CHEUNG_LEUNG_COM_CURVA_EUCLIDIANA, encoding='utf-8')
    assert main(['bound', str(caminho), '--out', str(tmp_path)]) == CODIGO_FALHA
    limite = _json(tmp_path / "cheung_leung_corrompido_limite.json")
    assert limite['veredito'] == "FALHOU"
    assert limite['limite'] == pytest.approx(0.25, abs=1e-6)
    assert limite['margem'] < 0


def test_verify_falha_com_tolerancia_impossivel(cenarios, tmp_path):
    codigo = _executar(cenarios, 'verify', 'produto_h2_r.toml', tmp_path, '--samples', '5', '--tol', '1e-300')
    assert codigo == CODIGO_FALHA
    verificacao = _json(tmp_path / "produto_h2_r_verificacao.json")
    assert verificacao['passou'] is False
    assert any(not v['passou'] for v in verificacao['verificacoes'])


def test_falha_geometrica_durante_calculo_sai_com_1(cenarios, tmp_path, monkeypatch):
    def fora_do_dominio(montagem, par):
        raise FronteiraDominio("ponto a menos de 2h da borda da carta")

    monkeypatch.setattr(orquestrador, 'executar_verificacoes', fora_do_dominio)
    assert _executar(cenarios, 'verify', 'produto_h2_r.toml', tmp_path) == CODIGO_FALHA
