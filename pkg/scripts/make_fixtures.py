"""Regenerate the JSON model files under fixtures/.

    python scripts/make_fixtures.py [outdir]
"""
import json
import os
import sys


def group_groupoid(name, elements, op, inv):
    e = elements[0]
    return {
        "units": [e],
        "arrows": [{"id": g, "src": e, "tgt": e} for g in elements[1:]],
        "compose": [[a, b, op(a, b)] for a in elements[1:] for b in elements[1:]],
        "inverse": [[g, inv(g)] for g in elements[1:]],
    }


def pair_groupoid(points):
    # arrow "a{i}{j}" goes from i to j
    arrows = [{"id": f"a{i}{j}", "src": i, "tgt": j} for i in points for j in points if i != j]

    def name(i, j):
        return i if i == j else f"a{i}{j}"

    compose = []
    for i in points:
        for j in points:
            for k in points:
                if i != j and j != k:
                    # (j -> k) o (i -> j) = (i -> k)
                    compose.append([name(j, k), name(i, j), name(i, k)])
    return {"units": list(points), "arrows": arrows, "compose": compose,
            "inverse": [[f"a{i}{j}", f"a{j}{i}"] for i in points for j in points if i != j]}


def disjoint(*parts):
    out = {"units": [], "arrows": [], "compose": [], "inverse": []}
    for p in parts:
        for k in out:
            out[k] += p[k]
    return out


def groupoid_file(payload, measure=None):
    if measure is not None:
        payload = dict(payload, measure=measure)
    return {"kind": "groupoid", "payload": payload, "options": {"scalars": "Q"}}


def z2():
    return group_groupoid("Z2", ["e", "g"], lambda a, b: "e", lambda g: g)


def z3():
    els = ["e", "a", "b"]
    return group_groupoid("Z3", els, lambda x, y: els[(els.index(x) + els.index(y)) % 3],
                          lambda g: els[-els.index(g) % 3])


def points_algebra(m):
    return {"labels": [f"p{i + 1}" for i in range(m)], "mult": [[i, i, i, "1"] for i in range(m)]}


def swap_crossed(weights=("1", "1")):
    sw = {"p1": [0, 1], "p2": [1, 0]}
    ident = {"p1": [1, 0], "p2": [0, 1]}
    right = [[x, h, (ident if h == "e" else sw)[x]] for h in ("e", "g") for x in ("p1", "p2")]
    left = [[h, y, (ident if h == "e" else sw)[y]] for h in ("e", "g") for y in ("p1", "p2")]
    return {"kind": "crossed_product", "options": {"scalars": "Q"}, "payload": {
        "group": {"elements": ["e", "g"], "table": [[0, 1], [1, 0]]},
        "hopf_variant": "group_algebra",
        "B": points_algebra(2),
        "S_B": [["1", "0"], ["0", "1"]],
        "right_action": right, "left_action": left,
        "mu_B": list(weights), "mu_C": list(weights)}}


def broken_coassoc():
    # functions on {e, g} with the comultiplication pulled back along NOR (not associative):
    # m(e, e) = g and m = e otherwise; still multiplicative, but not coassociative
    return {"kind": "raw_algebroid", "options": {"scalars": "Q"}, "payload": {
        "algebra": {"labels": ["d_e", "d_g"], "mult": [[0, 0, 0, "1"], [1, 1, 1, "1"]]},
        "B": [["1", "1"]], "C": [["1", "1"]], "S_B": [["1"]], "S_C": [["1"]],
        "D_B": [[[0, 1, "1"], [1, 0, "1"], [1, 1, "1"]], [[0, 0, "1"]]],
        "D_C": [[[0, 1, "1"], [1, 0, "1"], [1, 1, "1"]], [[0, 0, "1"]]],
        "base_weight": {"mu_B": ["1"], "mu_C": ["1"]}}}


def raw_z2_functions():
    # functions on Z/2 as a Hopf algebra over the trivial base, without integrals given
    return {"kind": "raw_algebroid", "options": {"scalars": "Q"}, "payload": {
        "algebra": {"labels": ["d_e", "d_g"], "mult": [[0, 0, 0, "1"], [1, 1, 1, "1"]]},
        "B": [["1", "1"]], "C": [["1", "1"]], "S_B": [["1"]], "S_C": [["1"]],
        "D_B": [[[0, 0, "1"], [1, 1, "1"]], [[0, 1, "1"], [1, 0, "1"]]],
        "D_C": [[[0, 0, "1"], [1, 1, "1"]], [[0, 1, "1"], [1, 0, "1"]]]}}


FIXTURES = {
    "trivial.json": groupoid_file({"units": ["x"]}),
    "z2_group.json": groupoid_file(z2()),
    "z3_group.json": groupoid_file(z3()),
    "pair2.json": groupoid_file(pair_groupoid(["1", "2"])),
    "pair2_weighted.json": groupoid_file(pair_groupoid(["1", "2"]), {"1": "1", "2": "2"}),
    "pair3.json": groupoid_file(pair_groupoid(["1", "2", "3"]), {"1": "1", "2": "2", "3": "3"}),
    "z2_pair2.json": groupoid_file(disjoint(z2(), pair_groupoid(["1", "2"])), {"e": "1", "1": "1", "2": "2"}),
    "swap_crossed.json": swap_crossed(),
    "broken_coassoc.json": broken_coassoc(),
    "raw_unmeasured.json": raw_z2_functions(),
}


def main(outdir):
    os.makedirs(outdir, exist_ok=True)
    for name, doc in FIXTURES.items():
        with open(os.path.join(outdir, name), "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    print(f"wrote {len(FIXTURES)} files to {outdir}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "fixtures"))
