"""Binary checkpoint of named float64 tensors.

Layout: magic, format version byte, tensor count, then per tensor the
UTF-8 name, rank, dims and raw little-endian float64 values. Tensors are
written in sorted name order so identical parameter dicts produce
byte-identical files.
"""

import struct

import numpy as np

MAGIC = b"QETN"
VERSION = 1


class CheckpointError(Exception):
    pass


def save_tensors(params, path):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([VERSION]))
        fh.write(struct.pack("<I", len(params)))
        for name in sorted(params):
            arr = np.ascontiguousarray(params[name], dtype="<f8")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack("<%dq" % arr.ndim, *arr.shape))
            fh.write(arr.tobytes())


def load_tensors(path):
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise CheckpointError("%s: not a tensor checkpoint (bad magic)" % path)
        version = fh.read(1)
        if not version or version[0] != VERSION:
            raise CheckpointError("%s: unsupported checkpoint version" % path)
        (count,) = struct.unpack("<I", fh.read(4))
        params = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack("<%dq" % ndim, fh.read(8 * ndim)) if ndim else ()
            n_values = int(np.prod(shape)) if ndim else 1
            raw = fh.read(8 * n_values)
            if len(raw) != 8 * n_values:
                raise CheckpointError("%s: truncated tensor %r" % (path, name))
            params[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        return params
