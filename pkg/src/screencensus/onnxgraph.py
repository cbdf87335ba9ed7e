"""Minimal ONNX model writer.

Serializes a computation graph straight to the ONNX protobuf wire format so
the repo can generate small self-contained .onnx files (demo/test models)
without an ONNX toolchain. Only the message fields needed for inference
graphs are implemented. The generated files load with
``cv2.dnn.readNetFromONNX``.
"""

from __future__ import annotations

import struct

import numpy as np

# TensorProto.DataType values
FLOAT = 1
INT64 = 7

_NP_TO_ONNX = {
    np.dtype("float32"): FLOAT,
    np.dtype("int64"): INT64,
}


def _varint(value: int) -> bytes:
    out = b""
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out += bytes([byte | 0x80])
        else:
            return out + bytes([byte])


def _tag(field: int, wire_type: int) -> bytes:
    return _varint((field << 3) | wire_type)


def _len_field(field: int, payload: bytes) -> bytes:
    return _tag(field, 2) + _varint(len(payload)) + payload


def _varint_field(field: int, value: int) -> bytes:
    return _tag(field, 0) + _varint(value)


def _str_field(field: int, text: str) -> bytes:
    return _len_field(field, text.encode("utf-8"))


def _tensor_proto(name: str, array: np.ndarray) -> bytes:
    array = np.ascontiguousarray(array)
    try:
        data_type = _NP_TO_ONNX[array.dtype]
    except KeyError:
        raise TypeError(f"unsupported initializer dtype {array.dtype}") from None
    msg = b"".join(_varint_field(1, int(d)) for d in array.shape)
    msg += _varint_field(2, data_type)
    msg += _str_field(8, name)
    msg += _len_field(9, array.tobytes())
    return msg


def _attribute(name: str, value) -> bytes:
    msg = _str_field(1, name)
    if isinstance(value, bool):
        raise TypeError("bool attributes are not part of ONNX")
    if isinstance(value, int):
        msg += _tag(3, 0) + _varint(value)
        msg += _varint_field(20, 2)  # AttributeProto.INT
    elif isinstance(value, float):
        msg += _tag(2, 5) + struct.pack("<f", value)
        msg += _varint_field(20, 1)  # FLOAT
    elif isinstance(value, str):
        msg += _len_field(4, value.encode("utf-8"))
        msg += _varint_field(20, 3)  # STRING
    elif isinstance(value, np.ndarray):
        msg += _len_field(5, _tensor_proto("", value))
        msg += _varint_field(20, 4)  # TENSOR
    elif isinstance(value, (list, tuple)):
        if all(isinstance(v, int) for v in value):
            msg += _len_field(8, b"".join(_varint(v) for v in value))
            msg += _varint_field(20, 7)  # INTS
        elif all(isinstance(v, float) for v in value):
            msg += _len_field(7, b"".join(struct.pack("<f", v) for v in value))
            msg += _varint_field(20, 6)  # FLOATS
        else:
            raise TypeError(f"mixed sequence attribute {name!r}")
    else:
        raise TypeError(f"unsupported attribute type for {name!r}: {type(value)}")
    return msg


def _value_info(name: str, dims, elem_type: int = FLOAT) -> bytes:
    shape = b""
    for d in dims:
        if isinstance(d, str):
            shape += _len_field(1, _str_field(2, d))
        else:
            shape += _len_field(1, _varint_field(1, int(d)))
    tensor_type = _varint_field(1, elem_type) + _len_field(2, shape)
    return _str_field(1, name) + _len_field(2, _len_field(1, tensor_type))


class GraphBuilder:
    """Accumulates nodes/initializers and serializes a ModelProto."""

    def __init__(self, name: str = "graph", opset: int = 13):
        self.name = name
        self.opset = opset
        self._nodes: list[bytes] = []
        self._initializers: list[bytes] = []
        self._inputs: list[bytes] = []
        self._outputs: list[bytes] = []
        self._auto = 0

    def fresh(self, stem: str = "t") -> str:
        self._auto += 1
        return f"{stem}_{self._auto}"

    def add_input(self, name: str, dims, elem_type: int = FLOAT) -> str:
        self._inputs.append(_value_info(name, dims, elem_type))
        return name

    def add_output(self, name: str, dims, elem_type: int = FLOAT) -> str:
        self._outputs.append(_value_info(name, dims, elem_type))
        return name

    def add_initializer(self, name: str, array: np.ndarray) -> str:
        self._initializers.append(_tensor_proto(name, array))
        return name

    def constant(self, array: np.ndarray, name: str | None = None) -> str:
        return self.add_initializer(name or self.fresh("const"), array)

    def node(self, op_type: str, inputs, outputs=None, **attrs) -> str:
        """Append a node; returns its (single) output name by default."""
        if outputs is None:
            outputs = [self.fresh(op_type.lower())]
        elif isinstance(outputs, str):
            outputs = [outputs]
        msg = b"".join(_str_field(1, i) for i in inputs)
        msg += b"".join(_str_field(2, o) for o in outputs)
        msg += _str_field(3, f"{op_type}_{outputs[0]}")
        msg += _str_field(4, op_type)
        for attr_name, attr_value in attrs.items():
            msg += _len_field(5, _attribute(attr_name, attr_value))
        self._nodes.append(msg)
        return outputs[0]

    def serialize(self) -> bytes:
        graph = b"".join(_len_field(1, n) for n in self._nodes)
        graph += _str_field(2, self.name)
        graph += b"".join(_len_field(5, t) for t in self._initializers)
        graph += b"".join(_len_field(11, i) for i in self._inputs)
        graph += b"".join(_len_field(12, o) for o in self._outputs)

        model = _varint_field(1, 8)  # ir_version
        model += _str_field(2, "screencensus")
        model += _len_field(8, _varint_field(2, self.opset))  # opset_import
        model += _len_field(7, graph)
        return model

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.serialize())
