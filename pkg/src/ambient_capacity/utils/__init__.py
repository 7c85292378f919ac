from .file_utils import ensure_dir, load_csv, load_json, save_csv, save_json, save_jsonl

__all__ = ["ensure_dir", "load_csv", "load_json", "save_csv", "save_json", "save_jsonl"]
