"""
File Repository Layer

Implements the repository pattern over plain files: instance headers with a binary
triangle sidecar, JSON reports, codeword digit strings, parity-check triplet exports and
local-code documents. All failures surface as StoreError.
"""

import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ValidationError

from hdxcodes.models.schemas import (
    CheckRecord,
    InstanceHeader,
    LocalCodeDocument,
    LocalCodeProvenance,
    Report,
)
from hdxcodes.services.algebra import Ring
from hdxcodes.services.coset_complex import ComplexInstance, build_complex, element_keys
from hdxcodes.services.local_code import LocalCodeSpec, interpolate_trivariate

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
MATRIX_HEADER = "%%MatrixMarket-like:"


class StoreError(Exception):
    """Custom exception for file storage operations."""
    pass


class BaseRepository:
    """Base repository with common file operations."""

    def __init__(self, root: Optional[PathLike] = None):
        """
        Initialize repository.

        Args:
            root: Directory that relative paths are resolved against (default: cwd)
        """
        self.root = Path(root) if root is not None else Path.cwd()

    def _path(self, path: PathLike) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.root / p

    def _write_text(self, path: PathLike, text: str) -> Path:
        target = self._path(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.error(f"Write failed for {target}: {e}")
            raise StoreError(f"Cannot write {target}: {str(e)}") from e
        return target

    def _read_text(self, path: PathLike) -> str:
        target = self._path(path)
        try:
            return target.read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"Read failed for {target}: {e}")
            raise StoreError(f"Cannot read {target}: {str(e)}") from e

    def _write_json(self, path: PathLike, data: Any) -> Path:
        return self._write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")

    def _read_json(self, path: PathLike) -> Any:
        try:
            return json.loads(self._read_text(path))
        except json.JSONDecodeError as e:
            raise StoreError(f"Invalid JSON in {path}: {str(e)}") from e

    def _read_model(self, path: PathLike, model: type) -> Any:
        data = self._read_json(path)
        try:
            return model.model_validate(data)
        except ValidationError as e:
            raise StoreError(f"{path} is not a valid {model.__name__}: {str(e)}") from e

    def _write_model(self, path: PathLike, document: BaseModel) -> Path:
        return self._write_json(path, document.model_dump(mode="json"))


class InstanceRepository(BaseRepository):
    """Complex instances: JSON header plus `<stem>.tri` packed canonical digit strings."""

    def save(self, x: ComplexInstance, path: PathLike) -> Path:
        """
        Persist an instance.

        The sidecar holds one byte per base-q digit, 9n digits per triangle, in triangle
        order; vertex and edge tables are stored as (type, rep-index) pairs.
        """
        target = self._path(path)
        sidecar = target.with_suffix(".tri")
        header = InstanceHeader(
            q=x.q,
            n=x.n,
            phi=list(x.phi),
            group_order=x.num_triangles,
            counts=x.counts(),
            digits_per_triangle=9 * x.n,
            sidecar=sidecar.name,
            vertices=[(int(t), int(r)) for t, r in zip(x.vertex_type, x.vertex_rep)],
            edges=[(int(t), int(r)) for t, r in zip(x.edge_type, x.edge_rep)],
        )
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            sidecar.write_bytes(x.triangles.astype(np.uint8).tobytes())
        except OSError as e:
            raise StoreError(f"Cannot write sidecar {sidecar}: {str(e)}") from e
        self._write_model(target, header)
        logger.info(f"Saved instance q={x.q}, n={x.n} to {target} (+ {sidecar.name})")
        return target

    def load_header(self, path: PathLike) -> InstanceHeader:
        return self._read_model(path, InstanceHeader)

    def load_triangles(self, path: PathLike, header: Optional[InstanceHeader] = None) -> np.ndarray:
        header = header or self.load_header(path)
        sidecar = self._path(path).with_name(header.sidecar)
        try:
            raw = np.frombuffer(sidecar.read_bytes(), dtype=np.uint8)
        except OSError as e:
            raise StoreError(f"Cannot read sidecar {sidecar}: {str(e)}") from e
        if raw.size != header.group_order * header.digits_per_triangle:
            raise StoreError(f"Sidecar {sidecar} has {raw.size} bytes, header disagrees")
        return raw.astype(np.int64).reshape(header.group_order, 3, 3, header.n)

    def load(self, path: PathLike, budget: Optional[int] = None) -> ComplexInstance:
        """
        Rebuild the instance from its header and check it against the stored tables.

        Raises:
            StoreError: If the rebuilt complex does not match the file
        """
        header = self.load_header(path)
        triangles = self.load_triangles(path, header)
        x = build_complex(Ring(header.q, tuple(header.phi)), budget)
        stored = element_keys(triangles, header.q)
        if not np.array_equal(stored, x.group.keys):
            raise StoreError(f"Triangle table in {path} does not match the rebuilt group")
        if header.vertices and [tuple(v) for v in header.vertices] != list(
            zip(x.vertex_type.tolist(), x.vertex_rep.tolist())
        ):
            raise StoreError(f"Vertex table in {path} does not match the rebuilt complex")
        if header.edges and [tuple(e) for e in header.edges] != list(
            zip(x.edge_type.tolist(), x.edge_rep.tolist())
        ):
            raise StoreError(f"Edge table in {path} does not match the rebuilt complex")
        return x


class ReportRepository(BaseRepository):
    """JSON reports."""

    def save(self, report: Report, path: PathLike) -> Path:
        return self._write_text(path, report.full_dump() + "\n")

    def load(self, path: PathLike) -> Report:
        return self._read_model(path, Report)

    def merge(self, paths: Iterable[PathLike]) -> Report:
        """Concatenate records of several reports, prefixing names with their command."""
        merged = Report(command="report")
        sources: List[str] = []
        for path in paths:
            report = self.load(path)
            sources.append(str(path))
            for record in report.records:
                merged.add(
                    CheckRecord(
                        name=f"{report.command}/{record.name}",
                        anchor=record.anchor,
                        status=record.status,
                        values=record.values,
                    )
                )
            for key, value in report.timing.items():
                merged.timing[f"{report.command}/{key}"] = value
        merged.config = {"inputs": sources}
        return merged


class CodewordRepository(BaseRepository):
    """Words on X(2) as base-q digit strings aligned to triangle order."""

    def save(self, word: np.ndarray, q: int, path: PathLike) -> Path:
        if q > 10:
            raise StoreError(f"Digit strings need q <= 10, got {q}")
        digits = "".join(str(int(s)) for s in np.asarray(word) % q)
        return self._write_text(path, digits + "\n")

    def load(self, path: PathLike, q: int, length: Optional[int] = None) -> np.ndarray:
        text = self._read_text(path).strip()
        if not text.isdigit():
            raise StoreError(f"{path} is not a digit string")
        word = np.frombuffer(text.encode("ascii"), dtype=np.uint8).astype(np.int64) - ord("0")
        if np.any(word >= q):
            raise StoreError(f"{path} has digits outside [0, {q})")
        if length is not None and word.size != length:
            raise StoreError(f"{path} has {word.size} symbols, expected {length}")
        return word


class MatrixRepository(BaseRepository):
    """Parity-check matrices as 0-indexed "row col value" triplets."""

    def save(self, matrix: sp.spmatrix, modulus: int, path: PathLike) -> Path:
        coo = sp.coo_matrix(matrix)
        order = np.lexsort((coo.col, coo.row))
        rows, cols = coo.row[order], coo.col[order]
        vals = np.asarray(coo.data[order], dtype=np.int64) % modulus
        keep = vals != 0
        lines = [f"{MATRIX_HEADER} {coo.shape[0]} {coo.shape[1]} {int(keep.sum())} {modulus}"]
        lines += [f"{r} {c} {v}" for r, c, v in zip(rows[keep], cols[keep], vals[keep])]
        return self._write_text(path, "\n".join(lines) + "\n")

    def load(self, path: PathLike) -> Tuple[sp.csr_matrix, int]:
        lines = self._read_text(path).splitlines()
        if not lines or not lines[0].startswith(MATRIX_HEADER):
            raise StoreError(f"{path} lacks the {MATRIX_HEADER} header")
        try:
            n_rows, n_cols, nnz, modulus = (int(t) for t in lines[0].split()[1:5])
            body = np.array([[int(t) for t in line.split()] for line in lines[1:] if line],
                            dtype=np.int64).reshape(-1, 3)
        except ValueError as e:
            raise StoreError(f"Malformed triplet file {path}: {str(e)}") from e
        if body.shape[0] != nnz:
            raise StoreError(f"{path} declares {nnz} entries, found {body.shape[0]}")
        matrix = sp.csr_matrix(
            (body[:, 2], (body[:, 0], body[:, 1])), shape=(n_rows, n_cols), dtype=np.int64
        )
        return matrix, modulus


class LocalCodeRepository(BaseRepository):
    """LocalCodeSpec as {p, dx, dy, dim, basis_eval, provenance}."""

    def save(self, spec: LocalCodeSpec, path: PathLike) -> Path:
        document = LocalCodeDocument(
            p=spec.p,
            dx=spec.d_x,
            dy=spec.d_y,
            dim=spec.dim,
            basis_eval=spec.basis_eval.tolist(),
            provenance=LocalCodeProvenance(formula_checked=spec.formula_checked, method=spec.method),
        )
        return self._write_model(path, document)

    def load(self, path: PathLike) -> LocalCodeSpec:
        document: LocalCodeDocument = self._read_model(path, LocalCodeDocument)
        basis_eval = np.asarray(document.basis_eval, dtype=np.int64).reshape(
            document.dim, document.p**3
        )
        full = interpolate_trivariate(basis_eval, document.p)
        if np.any(full[:, document.dx + 1 :, :, :]):
            raise StoreError(f"{path}: basis exceeds the row-line degree bound")
        spec = LocalCodeSpec(
            document.p,
            document.dx,
            document.dy,
            basis_eval,
            full[:, : document.dx + 1, :, :],
            formula_checked=document.provenance.formula_checked,
            method=document.provenance.method,
        )
        if not spec.syndrome_ok(basis_eval).all():
            raise StoreError(f"{path}: stored basis is not in C_({spec.d_x},{spec.d_y})")
        return spec
