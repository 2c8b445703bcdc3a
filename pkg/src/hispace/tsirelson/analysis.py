"""Analyses of norming functionals: layers K^s(phi) read off a certificate tree."""
from __future__ import annotations

from dataclasses import dataclass

from ..families import admissible
from ..kernel import FinVec
from .norm import CertLeaf, CertNode, NormCert, cert_functional
from .params import MTParams


def height(c: NormCert) -> int:
    return c.depth


@dataclass(frozen=True)
class Analysis:
    """layers[s] lists the certificate subtrees forming K^s(phi), left to right."""

    layers: tuple

    @property
    def top(self) -> NormCert:
        return self.layers[-1][0]

    def functionals(self, s: int) -> list[FinVec]:
        return [cert_functional(c) for c in self.layers[s]]

    def weight(self):
        t = self.top
        return t.theta if isinstance(t, CertNode) else None


def analysis_of(cert: NormCert) -> Analysis:
    """K^s(phi) = subtrees of height <= s whose parent has height > s (or phi itself)."""
    m = cert.depth
    layers = []
    for s in range(m + 1):
        layer: list = []

        def collect(c, parent_height):
            if c.depth <= s < parent_height:
                layer.append(c)
                return
            if isinstance(c, CertNode):
                for ch in c.children:
                    collect(ch, c.depth)

        collect(cert, m + 1)
        layers.append(tuple(layer))
    return Analysis(tuple(layers))


def analysis_violations(an: Analysis, params: MTParams) -> list[str]:
    """Checks conditions (1)-(4) of an analysis; empty list means all hold."""
    bad = []
    top = an.top
    if len(an.layers[-1]) != 1:
        bad.append("top layer is not a single functional")
    phi_support = set(cert_functional(top).support()) if _scalar(top) else {l.index for l in top.leaves()}
    for s, layer in enumerate(an.layers):
        spans = [(c.lo, c.hi) for c in layer]
        if any(a[1] >= b[0] for a, b in zip(spans, spans[1:])):
            bad.append(f"layer {s}: functionals not successive")
        if any(c.depth > s for c in layer):
            bad.append(f"layer {s}: member outside K^{s}")
        covered = {l.index for c in layer for l in c.leaves()}
        if covered != phi_support:
            bad.append(f"layer {s}: supports do not cover supp phi")
        if s == 0:
            if any(not isinstance(c, CertLeaf) for c in layer):
                bad.append("layer 0 contains a non-ground functional")
            continue
        prev = set(id(c) for c in an.layers[s - 1])
        for c in layer:
            if id(c) in prev:
                continue
            if not isinstance(c, CertNode):
                bad.append(f"layer {s}: new member is a leaf")
                continue
            if any(id(ch) not in prev for ch in c.children):
                bad.append(f"layer {s}: children of a new member are not in layer {s - 1}")
            fam = params.families[c.family - 1]
            if not admissible([range(ch.lo, ch.hi + 1) for ch in c.children], fam):
                bad.append(f"layer {s}: children not admissible for {fam}")
    return bad


def _scalar(c: NormCert) -> bool:
    return all(l.ground is None for l in c.leaves())
