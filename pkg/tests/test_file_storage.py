# tests/test_file_storage.py
from coalmu.schemas.run_config import RunConfig
from coalmu.utils.file_storage import FileStorage


def test_literal_source_is_returned_unchanged(tmp_path):
    storage = FileStorage(str(tmp_path))
    assert storage.read_source("p & q") == "p & q"


def test_at_source_reads_relative_to_base_dir(tmp_path):
    (tmp_path / "f.txt").write_text("  mu X. dia X\n")
    storage = FileStorage(str(tmp_path))
    assert storage.read_source("@f.txt") == "mu X. dia X"


def test_documents_are_written_with_parents(tmp_path):
    storage = FileStorage(str(tmp_path))
    path = storage.save_document(RunConfig(logic="graded"), "out/nested/config.json")
    assert storage.load_json(path)["logic"] == "graded"
    assert storage.save_text("x", "plain.txt").endswith("plain.txt")
    assert (tmp_path / "plain.txt").read_text() == "x"
