"""Edge-labeled bipartite planar trees and their decorated variants.

A minimal-transitive pair (theta, sigma) is stored as a planar tree: white
vertices are the theta-orbits, black vertices the sigma-orbits, edge i joins
the two orbits through i, and the counterclockwise edge order around a vertex
is the cycle order of the permutation.  Painting the black side with a sign
function gives a four-colored tree (green = -1, blue = 0, red = +1); snipping
the green leaves realizes cancellation of the -1 labels; attaching height
values as flags and vertex labels gives a labeled mobile.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .gjpairs import antiderivative, is_dmotz, is_gj_pair
from .perms import Permutation

WHITE, BLACK, BLUE, GREEN, RED = "white", "black", "blue", "green", "red"
COLOR_OF_SIGN = {-1: GREEN, 0: BLUE, 1: RED}
SIGN_OF_COLOR = {v: k for k, v in COLOR_OF_SIGN.items()}


def _orbit_cycles(perm: Permutation) -> tuple[tuple[int, ...], ...]:
    """All orbits as cycles in traversal order, singletons included, each
    rotated to start at its least label, sorted by least label."""
    out = []
    for orb in perm.orbits():
        start = min(orb)
        cyc = [start]
        cur = perm(start)
        while cur != start:
            cyc.append(cur)
            cur = perm(cur)
        out.append(tuple(cyc))
    return tuple(sorted(out, key=lambda c: c[0]))


def _normalize_cycles(cycles: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    normed = []
    for cyc in cycles:
        cyc = tuple(cyc)
        k = cyc.index(min(cyc))
        normed.append(cyc[k:] + cyc[:k])
    return tuple(sorted(normed, key=lambda c: c[0]))


@dataclass(frozen=True)
class PlanarTree:
    """An edge-labeled bipartite planar tree, optionally with colors on the
    black side.  Cycles are stored in canonical rotation (least label first,
    sorted by least label); ``black_colors`` aligns with ``black_cycles``."""

    white_cycles: tuple[tuple[int, ...], ...]
    black_cycles: tuple[tuple[int, ...], ...]
    black_colors: "tuple[str, ...] | None" = None

    def __post_init__(self):
        labels = sorted(i for c in self.white_cycles for i in c)
        if labels != sorted(i for c in self.black_cycles for i in c):
            raise ValueError("white and black sides must carry the same edge labels")
        if len(set(labels)) != len(labels):
            raise ValueError("edge labels must be distinct")
        if self.white_cycles != _normalize_cycles(self.white_cycles):
            raise ValueError("white cycles not canonical")
        if self.black_cycles != _normalize_cycles(self.black_cycles):
            raise ValueError("black cycles not canonical")
        if self.black_colors is not None:
            if len(self.black_colors) != len(self.black_cycles):
                raise ValueError("one color per black vertex required")
            bad = set(self.black_colors) - {BLACK, BLUE, GREEN, RED}
            if bad:
                raise ValueError(f"unknown colors {bad}")
        n = len(labels)
        if n and len(self.white_cycles) + len(self.black_cycles) != n + 1:
            raise ValueError("vertex and edge counts do not make a tree")
        if n and not self._connected():
            raise ValueError("tree is not connected")

    @staticmethod
    def make(white_cycles, black_cycles, black_colors=None) -> "PlanarTree":
        white = _normalize_cycles(white_cycles)
        blacks = list(black_cycles)
        normed = []
        for cyc in blacks:
            cyc = tuple(cyc)
            k = cyc.index(min(cyc))
            normed.append(cyc[k:] + cyc[:k])
        order = sorted(range(len(normed)), key=lambda t: normed[t][0])
        black = tuple(normed[t] for t in order)
        colors = None
        if black_colors is not None:
            colors = tuple(black_colors[t] for t in order)
        return PlanarTree(white, black, colors)

    def _connected(self) -> bool:
        wid = {i: ("w", k) for k, c in enumerate(self.white_cycles) for i in c}
        bid = {i: ("b", k) for k, c in enumerate(self.black_cycles) for i in c}
        parent: dict = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for v in list(wid.values()) + list(bid.values()):
            parent.setdefault(v, v)
        for i in wid:
            parent[find(wid[i])] = find(bid[i])
        roots = {find(v) for v in parent}
        return len(roots) == 1

    # -- reading off the permutations -------------------------------------

    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(i for c in self.white_cycles for i in c))

    @property
    def n(self) -> int:
        return len(self.labels())

    def theta(self) -> Permutation:
        return Permutation.from_cycles(self.labels(), self.white_cycles)

    def sigma(self) -> Permutation:
        return Permutation.from_cycles(self.labels(), self.black_cycles)

    def signs(self) -> tuple[int, ...]:
        """The sign function encoded by the colors, indexed by position in the
        sorted label list."""
        if self.black_colors is None:
            raise ValueError("tree carries no colors")
        value = {}
        for cyc, color in zip(self.black_cycles, self.black_colors):
            for i in cyc:
                value[i] = SIGN_OF_COLOR[color]
        return tuple(value[i] for i in self.labels())

    def white_of(self, label: int) -> int:
        for k, c in enumerate(self.white_cycles):
            if label in c:
                return k
        raise KeyError(label)

    def black_of(self, label: int) -> int:
        for k, c in enumerate(self.black_cycles):
            if label in c:
                return k
        raise KeyError(label)

    # -- canonical rooted code ---------------------------------------------

    def canonical_code(self):
        """Nested code from rooting at the white vertex holding the largest
        edge label and walking in counterclockwise order."""
        if not self.white_cycles:
            return ()
        root_label = max(self.labels())
        wcycles = {k: c for k, c in enumerate(self.white_cycles)}
        bcycles = {k: c for k, c in enumerate(self.black_cycles)}

        def walk_white(k: int, via: "int | None"):
            cyc = wcycles[k]
            if via is None:
                start = cyc.index(root_label)
                edges = cyc[start:] + cyc[:start]
            else:
                start = cyc.index(via)
                edges = cyc[start + 1:] + cyc[:start]
            return tuple((e, walk_black(self.black_of(e), e)) for e in edges)

        def walk_black(k: int, via: int):
            cyc = bcycles[k]
            start = cyc.index(via)
            edges = cyc[start + 1:] + cyc[:start]
            color = self.black_colors[k] if self.black_colors else BLACK
            return (color,) + tuple((e, walk_white(self.white_of(e), e))
                                    for e in edges)

        return walk_white(self.white_of(root_label), None)


# -- constructions -----------------------------------------------------------

def sv_tree(theta: Permutation, sigma: Permutation) -> PlanarTree:
    """The bipartite tree of a minimal-transitive pair."""
    if not is_gj_pair(theta, sigma):
        raise ValueError("pair is not minimal-transitive")
    return PlanarTree.make(_orbit_cycles(theta), _orbit_cycles(sigma))


def color_tree(theta: Permutation, sigma: Permutation,
               g: Sequence[int]) -> PlanarTree:
    """The four-colored tree of a sign-decorated pair."""
    if not is_gj_pair(theta, sigma):
        raise ValueError("pair is not minimal-transitive")
    if not is_dmotz(theta, sigma, g):
        raise ValueError("signs violate the balance constraints")
    blacks = _orbit_cycles(sigma)
    colors = tuple(COLOR_OF_SIGN[g[c[0] - 1]] for c in blacks)
    return PlanarTree.make(_orbit_cycles(theta), blacks, colors)


def coloring_rules_ok(tree: PlanarTree) -> bool:
    """The one-sided rules: greens are leaves, blues have degree two, and
    every white vertex has as many red as green neighbors."""
    if tree.black_colors is None:
        return False
    for cyc, color in zip(tree.black_cycles, tree.black_colors):
        if color == GREEN and len(cyc) != 1:
            return False
        if color == BLUE and len(cyc) != 2:
            return False
    sign = dict(zip(tree.labels(), tree.signs()))
    for cyc in tree.white_cycles:
        if sum(sign[i] for i in cyc) != 0:
            return False
    return True


@dataclass(frozen=True)
class SnipRecord:
    """What snipping forgets: the original white cycles (hence where each
    removed label sat in the counterclockwise order)."""

    white_cycles: tuple[tuple[int, ...], ...]


def snip(tree: PlanarTree) -> tuple[PlanarTree, SnipRecord]:
    """Remove every green leaf together with its edge and blacken the red
    vertices, producing the plain bipartite tree on the surviving labels.

    Only defined for the all-even family, where no blue vertices occur and
    each white vertex is half green."""
    if tree.black_colors is None:
        raise ValueError("snipping requires a colored tree")
    if BLUE in tree.black_colors:
        raise ValueError("blue vertices present; not from the all-even family")
    struck = {c[0] for c, col in zip(tree.black_cycles, tree.black_colors)
              if col == GREEN}
    for cyc in tree.white_cycles:
        greens = sum(1 for i in cyc if i in struck)
        if 2 * greens != len(cyc):
            raise ValueError("white vertex is not half green; "
                             "not from the all-even family")
    new_white = tuple(tuple(i for i in cyc if i not in struck)
                      for cyc in tree.white_cycles)
    new_black = tuple(c for c, col in zip(tree.black_cycles, tree.black_colors)
                      if col != GREEN)
    snipped = PlanarTree.make(new_white, new_black)
    return snipped, SnipRecord(tree.white_cycles)


def unsnip(snipped: PlanarTree, record: SnipRecord) -> PlanarTree:
    """Reattach the snipped leaves and restore the colors."""
    survivors = set(snipped.labels())
    struck = [i for cyc in record.white_cycles for i in cyc if i not in survivors]
    blacks = list(snipped.black_cycles) + [(i,) for i in sorted(struck)]
    colors = [RED] * len(snipped.black_cycles) + [GREEN] * len(struck)
    return PlanarTree.make(record.white_cycles, blacks, colors)


# -- mobiles -----------------------------------------------------------------

@dataclass(frozen=True)
class Mobile:
    """A bipartite tree decorated with height data: flags on the edges at
    former green (positive direction, value h(theta(i))) and former blue
    (negative direction, value h(i)) vertices, and integer labels on the
    former red vertices.  Heights are normalized to minimum zero."""

    white_cycles: tuple[tuple[int, ...], ...]
    black_cycles: tuple[tuple[int, ...], ...]
    flags: tuple[tuple[int, int, int], ...]        # (edge, direction, value)
    vertex_labels: tuple[tuple[int, int], ...]     # (least label of vertex, value)

    def base_tree(self) -> PlanarTree:
        return PlanarTree.make(self.white_cycles, self.black_cycles)


def mobile(theta: Permutation, sigma: Permutation, g: Sequence[int]) -> Mobile:
    """The labeled mobile of a sign-decorated pair."""
    tree = color_tree(theta, sigma, g)
    h = antiderivative(theta, sigma, g, normalization="min0")
    flags = []
    labels = []
    for cyc, color in zip(tree.black_cycles, tree.black_colors):
        if color == GREEN:
            for i in cyc:
                flags.append((i, 1, h[theta(i) - 1]))
        elif color == BLUE:
            for i in cyc:
                flags.append((i, -1, h[i - 1]))
        else:
            labels.append((cyc[0], h[theta(cyc[0]) - 1]))
    return Mobile(tree.white_cycles, tree.black_cycles,
                  tuple(sorted(flags)), tuple(sorted(labels)))


def mobile_to_color_tree(m: Mobile) -> PlanarTree:
    """Invert the mobile construction: labeled vertices turn red, unlabeled
    leaves green, unlabeled degree-two vertices blue."""
    labeled = {v for v, _ in m.vertex_labels}
    colors = []
    for cyc in m.black_cycles:
        if cyc[0] in labeled:
            colors.append(RED)
        elif len(cyc) == 1:
            colors.append(GREEN)
        elif len(cyc) == 2:
            colors.append(BLUE)
        else:
            raise ValueError("unlabeled black vertex of degree > 2")
    return PlanarTree.make(m.white_cycles, m.black_cycles, tuple(colors))


def mobile_round_trip(m: Mobile) -> Mobile:
    """Rebuild the mobile from its underlying decorated tree; equality with
    the input certifies reversibility."""
    tree = mobile_to_color_tree(m)
    return mobile(tree.theta(), tree.sigma(), tree.signs())


# -- serialization -----------------------------------------------------------

def _vertex_ids(tree_or_mobile):
    wid = {k: f"w{min(c)}" for k, c in enumerate(tree_or_mobile.white_cycles)}
    bid = {k: f"b{min(c)}" for k, c in enumerate(tree_or_mobile.black_cycles)}
    return wid, bid


def to_json_dict(obj: "PlanarTree | Mobile") -> dict:
    """Schema: vertices (id, color, label), edges (label, ends), cyclic_order
    per vertex id; mobiles add flags."""
    is_mobile = isinstance(obj, Mobile)
    wid, bid = _vertex_ids(obj)
    if is_mobile:
        base = obj.base_tree()
        colors = [BLACK] * len(obj.black_cycles)
        vlabels = dict(obj.vertex_labels)
    else:
        base = obj
        colors = list(obj.black_colors) if obj.black_colors else [BLACK] * len(obj.black_cycles)
        vlabels = {}
    vertices = []
    cyclic = {}
    for k, cyc in enumerate(obj.white_cycles):
        vertices.append({"id": wid[k], "color": WHITE, "label": None})
        cyclic[wid[k]] = list(cyc)
    for k, cyc in enumerate(obj.black_cycles):
        vertices.append({"id": bid[k], "color": colors[k],
                         "label": vlabels.get(min(cyc))})
        cyclic[bid[k]] = list(cyc)
    edges = [{"label": i, "ends": [wid[base.white_of(i)], bid[base.black_of(i)]]}
             for i in base.labels()]
    out = {
        "kind": "mobile" if is_mobile else "tree",
        "vertices": vertices,
        "edges": edges,
        "cyclic_order": cyclic,
    }
    if is_mobile:
        out["flags"] = [{"edge": e, "direction": "positive" if d > 0 else "negative",
                         "value": v} for e, d, v in obj.flags]
    return out


def to_json(obj: "PlanarTree | Mobile") -> str:
    return json.dumps(to_json_dict(obj), sort_keys=True, indent=2)


def from_json_dict(data: dict) -> "PlanarTree | Mobile":
    white = []
    black = []
    colors = []
    vlabels = {}
    for v in data["vertices"]:
        cyc = tuple(data["cyclic_order"][v["id"]])
        if v["color"] == WHITE:
            white.append(cyc)
        else:
            black.append(cyc)
            colors.append(v["color"])
            if v.get("label") is not None:
                vlabels[min(cyc)] = v["label"]
    if data.get("kind") == "mobile":
        flags = tuple(sorted((f["edge"], 1 if f["direction"] == "positive" else -1,
                              f["value"]) for f in data.get("flags", [])))
        base = PlanarTree.make(white, black)
        return Mobile(base.white_cycles, base.black_cycles, flags,
                      tuple(sorted(vlabels.items())))
    has_colors = any(c != BLACK for c in colors)
    return PlanarTree.make(white, black, tuple(colors) if has_colors else None)


def to_dot(obj: "PlanarTree | Mobile") -> str:
    """DOT rendering; counterclockwise orders are recorded as a node comment
    since layout engines do not honor embeddings."""
    is_mobile = isinstance(obj, Mobile)
    wid, bid = _vertex_ids(obj)
    base = obj.base_tree() if is_mobile else obj
    if is_mobile:
        colors = [BLACK] * len(obj.black_cycles)
        vlabels = dict(obj.vertex_labels)
        flags = {e: (d, v) for e, d, v in obj.flags}
    else:
        colors = list(obj.black_colors) if obj.black_colors else [BLACK] * len(obj.black_cycles)
        vlabels = {}
        flags = {}
    fill = {BLACK: "black", BLUE: "deepskyblue", GREEN: "forestgreen", RED: "firebrick"}
    lines = ["graph planar_tree {", "  node [shape=circle];"]
    for k, cyc in enumerate(obj.white_cycles):
        lines.append(f'  {wid[k]} [label="", style=filled, fillcolor=white, '
                     f'comment="ccw={",".join(map(str, cyc))}"];')
    for k, cyc in enumerate(obj.black_cycles):
        text = str(vlabels[min(cyc)]) if min(cyc) in vlabels else ""
        lines.append(f'  {bid[k]} [label="{text}", style=filled, '
                     f'fillcolor={fill[colors[k]]}, fontcolor=white, '
                     f'comment="ccw={",".join(map(str, cyc))}"];')
    for i in base.labels():
        wl = wid[base.white_of(i)]
        bl = bid[base.black_of(i)]
        label = str(i)
        if i in flags:
            d, v = flags[i]
            label += f" [flag {'+' if d > 0 else '-'}|{v}]"
        lines.append(f'  {wl} -- {bl} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
