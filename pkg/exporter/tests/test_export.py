import numpy as np
import pytest

from divan.embed import load_embedding_table
from divan.errors import DataError

from divan_exporter import ExportJob, export_embeddings

from conftest import FIXTURE_CORPUS, distinct_tokens


@pytest.fixture(scope="module")
def exported(tiny_model_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("export") / "vectors.tsv"
    return export_embeddings(ExportJob(corpus_path=FIXTURE_CORPUS, model_id=str(tiny_model_dir), output_path=out))


class TestExport:
    def test_row_count_is_distinct_token_count(self, exported):
        table = load_embedding_table(exported)
        assert len(table) == len(distinct_tokens(FIXTURE_CORPUS))

    def test_header_matches_hidden_size(self, exported):
        assert exported.read_text(encoding="utf-8").splitlines()[0] == "dim\t768"

    def test_rows_sorted_by_code_point(self, exported):
        lines = exported.read_text(encoding="utf-8").splitlines()[1:]
        tokens = [line.split("\t", 1)[0] for line in lines]
        assert tokens == sorted(tokens)

    def test_rerun_reproduces_keys_and_vectors(self, exported, tiny_model_dir, tmp_path):
        second = export_embeddings(
            ExportJob(corpus_path=FIXTURE_CORPUS, model_id=str(tiny_model_dir), output_path=tmp_path / "again.tsv")
        )
        a = load_embedding_table(exported)
        b = load_embedding_table(second)
        assert set(a.vectors) == set(b.vectors)
        for token, vector in a.vectors.items():
            assert np.allclose(vector, b.vectors[token], atol=1e-6)

    def test_no_scratch_file_left_behind(self, exported):
        assert not exported.with_suffix(exported.suffix + ".tmp").exists()

    def test_layer_selection_changes_vectors(self, tiny_model_dir, tmp_path):
        last = export_embeddings(
            ExportJob(corpus_path=FIXTURE_CORPUS, model_id=str(tiny_model_dir), output_path=tmp_path / "last.tsv")
        )
        first = export_embeddings(
            ExportJob(corpus_path=FIXTURE_CORPUS, model_id=str(tiny_model_dir), output_path=tmp_path / "embed.tsv", layer=0)
        )
        a = load_embedding_table(last)
        b = load_embedding_table(first)
        token = next(iter(sorted(a.vectors)))
        assert not np.allclose(a.vectors[token], b.vectors[token], atol=1e-6)

    def test_layer_out_of_range(self, tiny_model_dir, tmp_path):
        job = ExportJob(corpus_path=FIXTURE_CORPUS, model_id=str(tiny_model_dir), output_path=tmp_path / "x.tsv", layer=9)
        with pytest.raises(ValueError, match="layer"):
            export_embeddings(job)

    def test_unknown_pooling_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="pooling"):
            ExportJob(corpus_path=FIXTURE_CORPUS, model_id="x", output_path=tmp_path / "x.tsv", pooling="max")

    def test_model_unavailable(self, tmp_path):
        job = ExportJob(corpus_path=FIXTURE_CORPUS, model_id=str(tmp_path / "no-model"), output_path=tmp_path / "x.tsv")
        with pytest.raises(DataError, match="model unavailable"):
            export_embeddings(job)

    def test_single_token_corpus(self, tiny_model_dir, tmp_path):
        book = tmp_path / "corpus" / "b1"
        book.mkdir(parents=True)
        (book / "01.txt").write_text("عنوان\nکتاب از کتاب\n", encoding="utf-8")
        out = export_embeddings(
            ExportJob(corpus_path=tmp_path / "corpus", model_id=str(tiny_model_dir), output_path=tmp_path / "one.tsv")
        )
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "dim\t768"
        assert len(lines) == 2
        assert lines[1].split("\t")[0] == "کتاب"
        assert len(lines[1].split("\t")) == 769

    def test_same_token_sets_give_same_row_keys(self, tiny_model_dir, tmp_path):
        for name, verse in (("a", "ستاره دریا ماه"), ("b", "ماه ستاره دریا")):
            book = tmp_path / name / "b1"
            book.mkdir(parents=True)
            (book / "01.txt").write_text(f"عنوان\n{verse}\n", encoding="utf-8")
        keys = []
        for name in ("a", "b"):
            out = export_embeddings(
                ExportJob(corpus_path=tmp_path / name, model_id=str(tiny_model_dir), output_path=tmp_path / f"{name}.tsv")
            )
            lines = out.read_text(encoding="utf-8").splitlines()[1:]
            keys.append([line.split("\t")[0] for line in lines])
        assert keys[0] == keys[1]

    def test_stopword_only_corpus_is_empty_token_set(self, tiny_model_dir, tmp_path):
        book = tmp_path / "corpus" / "b1"
        book.mkdir(parents=True)
        (book / "01.txt").write_text("هیچ\nاز به با تا\nکه را تا هم\n", encoding="utf-8")
        job = ExportJob(corpus_path=tmp_path / "corpus", model_id=str(tiny_model_dir), output_path=tmp_path / "x.tsv")
        with pytest.raises(DataError, match="token set empty"):
            export_embeddings(job)


class TestCli:
    def test_cli_writes_table(self, tiny_model_dir, tmp_path, capsys):
        from divan_exporter.cli import main

        out = tmp_path / "cli.tsv"
        code = main([str(FIXTURE_CORPUS), str(tiny_model_dir), str(out)])
        assert code == 0
        assert out.is_file()
        assert "wrote" in capsys.readouterr().out

    def test_cli_reports_data_errors(self, tmp_path, capsys):
        from divan_exporter.cli import main

        code = main([str(FIXTURE_CORPUS), str(tmp_path / "missing-model"), str(tmp_path / "x.tsv")])
        assert code == 2
        assert "model unavailable" in capsys.readouterr().err
