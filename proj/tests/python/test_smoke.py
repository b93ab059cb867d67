"""Python binding smoke tests.

Run by ctest with SHADOWROAD_EXT_DIR pointing at the directory that
holds the built _core extension and PYTHONPATH at python/.
"""

import os
import sys

ext_dir = os.environ.get("SHADOWROAD_EXT_DIR")
if ext_dir:
    sys.path.insert(0, ext_dir)

import numpy as np  # noqa: E402

import shadowroad as sr  # noqa: E402


def test_color_round_trip():
    rng = np.random.default_rng(7)
    img = rng.random((16, 24, 3))
    hsv = sr.rgb_to_hsv(img)
    assert hsv.shape == img.shape
    back = sr.hsv_to_rgb(hsv)
    assert np.max(np.abs(back - img)) < 1e-9


def test_ndi_and_otsu():
    hsv = np.zeros((8, 8, 3))
    hsv[:, :, 1] = 0.2   # saturation
    hsv[:, :, 2] = 0.6   # value
    ndi = sr.compute_ndi(hsv)
    assert np.allclose(ndi, -0.5)

    gray = np.zeros((10, 10))
    gray[:, 5:] = 1.0
    t = sr.otsu_threshold(gray)
    mask = sr.binarize(gray, t)
    assert mask[:, 5:].all() and not mask[:, :5].any()


def test_morphology():
    m = np.zeros((7, 7), dtype=bool)
    m[3, 3] = True
    d = sr.dilate(m, "square:3")
    assert d.sum() == 9
    assert not sr.open(m, "square:3").any()  # isolated pixel removed
    assert sr.erode(d, "square:3").sum() == 1

    ring = np.zeros((7, 7), dtype=bool)
    ring[1, 1:6] = ring[5, 1:6] = ring[1:6, 1] = ring[1:6, 5] = True
    filled = sr.fill_region(ring, 3, 3, "cross:3")
    assert filled.sum() == 25


def test_road_model_and_svm():
    rng = np.random.default_rng(11)
    pixels = 0.5 + 0.01 * rng.standard_normal((64, 3))
    model = sr.fit_road_model(pixels)
    assert np.allclose(model.mean, 0.5, atol=0.01)
    assert sr.mahalanobis(model, np.array([0.5, 0.5, 0.5])) < 3.0

    x = np.array([[-1.0, 0, 0], [1.0, 0, 0]])
    y = np.array([-1, 1], dtype=np.int32)
    svm = sr.train_svm(x, y, c=1e9, tol=1e-6)
    assert abs(svm.w[0] - 1.0) < 1e-6
    assert abs(svm.b) < 1e-6


def test_pipeline_end_to_end():
    image, road_truth, shadow_truth = sr.generate_scene(2, 5, True)
    assert image.shape == (240, 320, 3)
    assert road_truth.dtype == bool and shadow_truth.any()

    cfg = sr.PipelineConfig()
    result = sr.run_frame(image, cfg, road_truth)
    assert result["refined"].shape == road_truth.shape
    assert result["rates"]["acc"] >= 0.90

    cfg.filtering_enabled = False
    worse = sr.run_frame(image, cfg, road_truth)
    assert result["rates"]["err"] < worse["rates"]["err"]

    counts = sr.confusion(result["refined"], road_truth)
    r = sr.rates(counts["tp"], counts["tn"], counts["fp"], counts["fn"])
    assert abs(r["acc"] + r["err"] - 1.0) < 1e-12


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
