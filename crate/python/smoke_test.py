"""Smoke test for the dp5py extension module.

Builds the module with the extension-module feature, copies the shared
library next to this script under the importable name, and checks one
value from every binding. Run from anywhere:

    python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import subprocess
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def ensure_module():
    subprocess.run(
        [
            "cargo",
            "build",
            "-p",
            "dp5-py",
            "--release",
            "--features",
            "extension-module",
        ],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libdp5py.so"
    importable = HERE / "dp5py.so"
    shutil.copy2(built, importable)
    sys.path.insert(0, str(HERE))


def main():
    ensure_module()
    import dp5py

    assert dp5py.hj_expand(20, 9) == [3, 2, 2, 2, 3]
    assert dp5py.hj_contract([3, 2, 2, 2, 3]) == (20, 9)
    assert json.loads(dp5py.classify(20, 9)) == {
        "result": "t",
        "p": 2,
        "q": 5,
        "d": 1,
    }
    assert json.loads(dp5py.classify(5, 2)) == {"result": "not-t"}
    assert dp5py.gorenstein_index(20, 9) == 2
    assert dp5py.lct(5, 5) == "2/5"
    assert dp5py.lct(3, 7) == "10/21"
    print("ok: scalar queries")

    report = json.loads(dp5py.build_pair("trigonal2:4"))
    assert report["k_squared"] == "5"
    assert report["curve_genus"] == "6"
    assert report["surface_singularities"] == [{"kind": "quotient", "r": 20, "a": 9}]
    assert report["k3_singularities"] == [{"kind": "A", "n": 9}]
    print("ok: build_pair")

    entries = json.loads(dp5py.atlas())
    assert len(entries) == 21
    keys = [e["stratum"] for e in entries]
    assert keys == sorted(keys)
    assert all(e["k_squared"] == "5" for e in entries)
    print("ok: atlas")

    assert dp5py.scenarios() == [
        "bielliptic",
        "quintic-11111",
        "trigonal-0-1111",
        "trigonal-2-4",
    ]
    outcome = json.loads(dp5py.run_scenario("trigonal-2-4"))
    assert outcome["final_report"]["stratum"] == "trigonal2:4"
    assert all(c["pass"] for step in outcome["steps"] for c in step["checks"])
    print("ok: scenarios")

    s = dp5py.Surface.projective_plane()
    s.track("l", [1])
    s.track("D", [5])
    for i in range(1, 6):
        s.blow_up(f"E{i}", {"l": 1, "D": 1})
    assert s.basis() == ["H", "E1", "E2", "E3", "E4", "E5"]
    assert s.k_squared() == 4
    assert s.adjunction_genus(s.tracked("D")) == "6"
    assert s.intersect(s.tracked("l"), s.tracked("l")) == -4
    contraction = json.loads(s.contract([["l"]]))
    assert contraction["k_squared_down"] == "5"
    assert contraction["singularities"] == [{"kind": "quotient", "r": 4, "a": 1}]
    assert json.loads(s.to_json())["base"] == {"kind": "projective-plane"}
    print("ok: surface class")

    print("smoke test passed")


if __name__ == "__main__":
    main()
