"""Flat named parameter store with matching gradient buffers.

Checkpoint layout: a directory holding ``manifest.json`` (schema tag,
seed, optimizer step, tensor names/shapes, optional extra metadata) and
one raw little-endian float64 blob per tensor.
"""

import hashlib
import json
import os

import numpy as np

from .._rand import substream

CHECKPOINT_SCHEMA = "checkpoint/1"


class ModelParams:
    """Named float64 tensors plus same-shape gradient buffers.

    Initialisation draws come from one seeded stream in registration
    order, so a model built the same way from the same seed is
    bit-identical.  ``version`` increments on every value mutation;
    recurrent caches use it to detect staleness.
    """

    def __init__(self, seed: int = 0):
        self.values: dict = {}
        self.grads: dict = {}
        self.seed = int(seed)
        self.version = 0
        self._init_rng = substream(seed, "param-init")

    @property
    def names(self):
        return list(self.values)

    def add(self, name: str, shape, fan_in=None, scale=None, fill: float = 0.0) -> np.ndarray:
        """Register a tensor: uniform(-1/sqrt(fan_in), ..), uniform(-scale, ..)
        or constant fill."""
        if name in self.values:
            raise ValueError(f"duplicate parameter {name!r}")
        if fan_in is not None and scale is not None:
            raise ValueError("give fan_in or scale, not both")
        shape = tuple(shape)
        if fan_in is not None:
            scale = 1.0 / np.sqrt(fan_in)
        if scale is not None:
            arr = self._init_rng.uniform(-scale, scale, size=shape)
        else:
            arr = np.full(shape, float(fill), dtype=np.float64)
        self.values[name] = arr
        self.grads[name] = np.zeros(shape, dtype=np.float64)
        return arr

    def zero_grads(self, names=None) -> None:
        for name in names if names is not None else self.grads:
            self.grads[name][...] = 0.0

    def check_finite(self) -> None:
        for name, arr in self.values.items():
            if not np.isfinite(arr).all():
                raise ValueError(f"parameter {name!r} contains non-finite values")

    def snapshot(self) -> dict:
        return {name: arr.copy() for name, arr in self.values.items()}

    def restore(self, snap: dict) -> None:
        for name, arr in snap.items():
            self.values[name][...] = arr
        self.version += 1

    def checksum(self, names=None) -> str:
        """Hex digest over the selected tensors' names and raw bytes."""
        digest = hashlib.sha256()
        for name in sorted(names if names is not None else self.values):
            digest.update(name.encode("utf-8"))
            digest.update(self.values[name].tobytes())
        return digest.hexdigest()

    def save(self, path, step: int = 0, extra: dict | None = None) -> None:
        os.makedirs(path, exist_ok=True)
        tensors = []
        for i, (name, arr) in enumerate(self.values.items()):
            fname = f"t{i:04d}.bin"
            with open(os.path.join(path, fname), "wb") as fh:
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
            tensors.append({"name": name, "shape": list(arr.shape), "file": fname})
        manifest = {
            "schema": CHECKPOINT_SCHEMA,
            "seed": self.seed,
            "step": int(step),
            "tensors": tensors,
        }
        if extra:
            manifest["extra"] = extra
        with open(os.path.join(path, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=1)

    @classmethod
    def load(cls, path):
        """Returns (params, manifest)."""
        with open(os.path.join(path, "manifest.json"), "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        if manifest.get("schema") != CHECKPOINT_SCHEMA:
            raise ValueError(f'expected schema "{CHECKPOINT_SCHEMA}"')
        params = cls(seed=manifest["seed"])
        for spec in manifest["tensors"]:
            shape = tuple(spec["shape"])
            with open(os.path.join(path, spec["file"]), "rb") as fh:
                arr = np.frombuffer(fh.read(), dtype="<f8").astype(np.float64)
            params.values[spec["name"]] = arr.reshape(shape)
            params.grads[spec["name"]] = np.zeros(shape, dtype=np.float64)
        return params, manifest
