"""Smoke test for the chowbench extension module."""

import chowbench


def main():
    cube = chowbench.example("cube", n=3)
    an = chowbench.analyze(cube)
    assert an["critical_values"] == ["0", "1", "2", "3"], an["critical_values"]
    assert an["equalized"]

    d = chowbench.diagram(cube)
    assert all(s["holds"] for s in d["squares"]), d["squares"]

    perm = chowbench.chow(chowbench.example("cube", n=4))
    assert perm["fans_equal"]
    assert len(perm["minkowski"]["vertices"]) == 24

    brus = chowbench.analyze(chowbench.example("brus"))
    assert brus["critical_values"] == ["0", "1", "3", "4"]

    square = chowbench.example("square")
    try:
        chowbench.diagram(square, nu=[2, 1])
    except chowbench.NotEqualizedError:
        pass
    else:
        raise AssertionError("nu = (2, 1) should be refused")
    assert any("re-parametrized" in w for w in chowbench.warnings(square, nu=[2, 2]))
    try:
        chowbench.analyze(square, nu=[0, 0])
    except chowbench.TrivialActionError:
        pass
    else:
        raise AssertionError("nu = 0 should be refused")
    print("smoke test ok")


if __name__ == "__main__":
    main()
