"""The ONNX writer's files must load and compute correctly under cv2.dnn."""

import cv2
import numpy as np

from screencensus.onnxgraph import GraphBuilder


def test_gemm_graph_roundtrip(tmp_path, rng):
    w = rng.normal(size=(4, 6)).astype(np.float32)
    b = rng.normal(size=4).astype(np.float32)
    g = GraphBuilder("t")
    g.add_input("x", ["N", 6])
    g.constant(w, "w")
    g.constant(b, "b")
    g.node("Gemm", ["x", "w", "b"], "y", transB=1)
    g.add_output("y", ["N", 4])
    path = tmp_path / "m.onnx"
    g.save(path)

    net = cv2.dnn.readNetFromONNX(str(path))
    x = rng.normal(size=(3, 6)).astype(np.float32)
    net.setInput(x)
    out = net.forward()
    np.testing.assert_allclose(out, x @ w.T + b, atol=1e-5)


def test_conv_softmax_graph(tmp_path, rng):
    w = rng.normal(size=(2, 3, 3, 3)).astype(np.float32)
    g = GraphBuilder("conv")
    g.add_input("x", [1, 3, 8, 8])
    g.constant(w, "w")
    g.constant(np.zeros(2, dtype=np.float32), "bias")
    c = g.node("Conv", ["x", "w", "bias"], kernel_shape=[3, 3],
               pads=[1, 1, 1, 1], strides=[1, 1])
    r = g.node("Relu", [c])
    p = g.node("GlobalAveragePool", [r])
    f = g.node("Flatten", [p], axis=1)
    g.node("Softmax", [f], "y", axis=1)
    g.add_output("y", [1, 2])
    path = tmp_path / "conv.onnx"
    g.save(path)

    net = cv2.dnn.readNetFromONNX(str(path))
    x = rng.normal(size=(1, 3, 8, 8)).astype(np.float32)
    net.setInput(x)
    out = net.forward()
    assert out.shape == (1, 2)
    assert abs(out.sum() - 1.0) < 1e-5

    padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
    conv = np.zeros((2, 8, 8), dtype=np.float64)
    for co in range(2):
        for i in range(8):
            for j in range(8):
                conv[co, i, j] = float((padded[0, :, i:i + 3, j:j + 3] * w[co]).sum())
    feats = np.maximum(conv, 0).mean(axis=(1, 2))
    exps = np.exp(feats - feats.max())
    np.testing.assert_allclose(out[0], exps / exps.sum(), atol=1e-5)


def test_slice_and_concat(tmp_path, rng):
    g = GraphBuilder("sl")
    g.add_input("x", [1, 1, 6, 6])
    starts = g.constant(np.array([1, 1], dtype=np.int64))
    ends = g.constant(np.array([5, 5], dtype=np.int64))
    axes = g.constant(np.array([2, 3], dtype=np.int64))
    s = g.node("Slice", ["x", starts, ends, axes])
    f1 = g.node("Flatten", [s], axis=1)
    f2 = g.node("Flatten", ["x"], axis=1)
    g.node("Concat", [f1, f2], "y", axis=1)
    g.add_output("y", [1, 16 + 36])
    path = tmp_path / "s.onnx"
    g.save(path)

    net = cv2.dnn.readNetFromONNX(str(path))
    x = rng.normal(size=(1, 1, 6, 6)).astype(np.float32)
    net.setInput(x)
    out = net.forward()
    np.testing.assert_allclose(out[0, :16], x[0, 0, 1:5, 1:5].ravel(), atol=1e-6)
    np.testing.assert_allclose(out[0, 16:], x.ravel(), atol=1e-6)
