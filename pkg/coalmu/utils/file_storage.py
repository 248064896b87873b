# coalmu/utils/file_storage.py

import json
import logging
import os
from typing import Any, Dict

from pydantic import BaseModel

logger = logging.getLogger(__name__)


class FileStorage:
    def __init__(self, base_dir: str = "."):
        self.base_dir = base_dir

    def resolve(self, path: str) -> str:
        """Relative paths are taken from the base directory"""
        if os.path.isabs(path):
            return path
        return os.path.join(self.base_dir, path)

    def ensure_parent(self, path: str):
        parent = os.path.dirname(path)
        if parent and not os.path.exists(parent):
            os.makedirs(parent, exist_ok=True)

    def read_source(self, source: str) -> str:
        """
        Formula source: literal text, or @path for the contents of a file
        """
        if not source.startswith("@"):
            return source
        path = self.resolve(source[1:])
        with open(path, "r", encoding="utf-8") as f:
            text = f.read().strip()
        logger.debug(f"Read formula source from {path}")
        return text

    def load_json(self, path: str) -> Dict[str, Any]:
        with open(self.resolve(path), "r", encoding="utf-8") as f:
            return json.load(f)

    def save_document(self, document: BaseModel, path: str) -> str:
        """Write a pydantic document as indented JSON and return the path"""
        path = self.resolve(path)
        self.ensure_parent(path)
        with open(path, "w", encoding="utf-8") as f:
            f.write(document.model_dump_json(indent=2, by_alias=True))
            f.write("\n")
        logger.info(f"Wrote {type(document).__name__} to {path}")
        return path

    def save_text(self, text: str, path: str) -> str:
        path = self.resolve(path)
        self.ensure_parent(path)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path


# Initialize file storage
file_storage = FileStorage()
