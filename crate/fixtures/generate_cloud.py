#!/usr/bin/env python3
"""Generates the synthetic three-endpoint cloud under fixtures/cloud/.

Usage: python3 fixtures/generate_cloud.py [--seed 42] [--out fixtures/cloud]

Output is deterministic for a given seed. manifest.json is computed by
enumerating the generated quads directly.
"""

import argparse
import json
import math
import os
import random
import re
import string
from collections import defaultdict

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDF_LANG = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
XSD = "http://www.w3.org/2001/XMLSchema#"
DCT = "http://purl.org/dc/terms/"
SKOS = "http://www.w3.org/2004/02/skos/core#"
OBO = "http://purl.obolibrary.org/obo/"

DBV = "http://bio2rdf.org/drugbank_vocabulary:"
DBR = "http://bio2rdf.org/drugbank:"
DBX = "http://bio2rdf.org/drugbank_resource:"
KV = "http://bio2rdf.org/kegg_vocabulary:"
KR = "http://bio2rdf.org/kegg:"
CH = "http://rdf.ebi.ac.uk/terms/chembl#"
CHR = "http://rdf.ebi.ac.uk/resource/chembl/"
MV = "http://rdf.example.org/mold/vocab#"
MR = "http://rdf.example.org/mold/id/"

G_DRUGBANK = "http://bio2rdf.org/drugbank_resource:bio2rdf.dataset.drugbank.R3"
G_KEGG3 = "http://bio2rdf.org/kegg_resource:bio2rdf.dataset.kegg.R3"
G_KEGG4 = "http://bio2rdf.org/kegg_resource:bio2rdf.dataset.kegg.R4"
G_CHEMBL = "http://rdf.ebi.ac.uk/dataset/chembl/24.1"
G_MOLD = "http://rdf.example.org/mold/graph/2018"

ENDPOINTS = {
    "bio2rdf": [G_DRUGBANK, G_KEGG3, G_KEGG4],
    "ebi": [G_CHEMBL],
    "mold": [G_MOLD],
}
SOURCE_OF = {
    G_DRUGBANK: "drugbank",
    G_KEGG3: "kegg",
    G_KEGG4: "kegg",
    G_CHEMBL: "chembl",
    G_MOLD: "mold",
}

# (family, source, property uri, derived label)
FAMILIES = [
    ("molecular_weight", "drugbank", DBV + "molecular-weight", "Molecular Weight"),
    ("molecular_weight", "kegg", KV + "mol_weight", "Mol Weight"),
    ("molecular_weight", "chembl", CH + "hasMolecularWeight", "Has Molecular Weight"),
    ("enzyme_ec", "drugbank", DBV + "ec-number", "Ec Number"),
    ("enzyme_ec", "kegg", KV + "ec-code", "Ec Code"),
    ("enzyme_ec", "chembl", CH + "hasEcNumber", "Has Ec Number"),
    ("phenotype_omim", "drugbank", DBV + "omim-phenotype", "Omim Phenotype"),
    ("phenotype_omim", "kegg", KV + "omim", "Omim"),
    ("phenotype_omim", "mold", MV + "phenotypeOmim", "Phenotype Omim"),
    ("gene_id", "kegg", KV + "gene-id", "Gene Id"),
    ("gene_id", "chembl", CH + "geneIdentifier", "Gene Identifier"),
    ("gene_id", "mold", MV + "entrezGeneId", "Entrez Gene Id"),
]
FAMILY_WORDS = {
    "molecular_weight": ["molecular", "weight", "mol"],
    "enzyme_ec": ["ec"],
    "phenotype_omim": ["omim", "phenotype"],
    "gene_id": ["gene", "entrez"],
}
GENERIC_WORDS = ["has", "id", "identifier", "number", "code", "of", "to", "x", "type"]
OOV_WORDS = {"cellosaurus"}

# Endpoint-side rdfs:label annotations on schema elements.
ENDPOINT_LABELS = {
    G_DRUGBANK: [(DBV + "x-kegg", "kegg cross reference")],
    G_CHEMBL: [(CH + "hasAssay", "assay")],
}

DIM = 12


class Graph:
    def __init__(self, uri, rnd):
        self.uri = uri
        self.rnd = rnd
        self.quads = []
        self.seen = set()
        self.instances = {}

    def add(self, s, p, o):
        if (s, p, o) not in self.seen:
            self.seen.add((s, p, o))
            self.quads.append((s, p, o))

    def cls(self, uri, ids):
        self.instances[uri] = list(ids)
        for i in ids:
            self.add(("iri", i), RDF_TYPE, ("iri", uri))

    def prop(self, cls, prop, target, p_present=0.9, max_values=1):
        for s in self.instances[cls]:
            if self.rnd.random() >= p_present:
                continue
            for _ in range(self.rnd.randint(1, max_values)):
                self.add(("iri", s), prop, target(self.rnd))


def pick(graph, cls):
    pool = graph.instances[cls]
    return lambda r: ("iri", r.choice(pool))


def ext(fmt, lo, hi):
    return lambda r: ("iri", fmt % r.randint(lo, hi))


def lit(kind, gen):
    """kind: None (plain), '@en', or a datatype IRI."""
    return lambda r: ("lit", gen(r), kind)


def bnode(counter):
    def make(r):
        counter[0] += 1
        return ("bnode", "b%d" % counter[0])

    return make


WORDS = ("alpha beta gamma delta kinase receptor oral tablet solution human mouse "
         "liver plasma binding inhibitor agonist assay cell membrane transport").split()


def text(lo, hi):
    return lambda r: " ".join(r.choice(WORDS) for _ in range(r.randint(lo, hi)))


def num(lo, hi, digits=2):
    return lambda r: "%.*f" % (digits, r.uniform(lo, hi))


def integer(lo, hi):
    return lambda r: str(r.randint(lo, hi))


def code(prefix, lo, hi, width=0):
    return lambda r: "%s%0*d" % (prefix, width, r.randint(lo, hi))


def ec(r):
    return "%d.%d.%d.%d" % (r.randint(1, 6), r.randint(1, 20), r.randint(1, 30), r.randint(1, 200))


def build(seed):
    rnd = random.Random(seed)
    graphs = {}
    blank = [0]

    # drugbank
    g = graphs[G_DRUGBANK] = Graph(G_DRUGBANK, rnd)
    g.cls(DBV + "Drug", [DBR + "DB%05d" % i for i in range(1, 301)])
    g.cls(DBV + "Target", [DBR + "BE%07d" % i for i in range(1, 121)])
    g.cls(DBV + "Enzyme", [DBR + "BE%07d" % i for i in range(5001, 5041)])
    g.cls(DBV + "Category", [DBX + "category_%d" % i for i in range(1, 31)])
    g.cls(DBV + "Drug-Drug-Interaction",
          [DBX + "DB%05d_DB%05d" % (i, i + 7) for i in range(1, 201)])
    g.cls(DBV + "Dosage", [DBX + "dosage_%d" % i for i in range(1, 51)])
    g.cls(DBV + "Mixture", [DBX + "mixture_%d" % i for i in range(1, 41)])
    g.cls(DBV + "Salt", [DBR + "DBSALT%06d" % i for i in range(1, 31)])
    g.cls(DBV + "Patent", [DBX + "patent_%d" % i for i in range(1, 31)])
    g.prop(DBV + "Drug", RDFS_LABEL, lit("@en", text(1, 3)), 1.0)
    g.prop(DBV + "Drug", DCT + "title", lit(None, text(1, 4)), 0.95)
    g.prop(DBV + "Drug", DBV + "molecular-weight", lit(XSD + "double", num(50, 900)), 0.85)
    g.prop(DBV + "Drug", DBV + "x-kegg", ext(KR + "D%05d", 1, 220), 0.5)
    g.prop(DBV + "Drug", DBV + "target", pick(g, DBV + "Target"), 0.8, 3)
    g.prop(DBV + "Drug", DBV + "enzyme", pick(g, DBV + "Enzyme"), 0.4, 2)
    g.prop(DBV + "Drug", DBV + "category", pick(g, DBV + "Category"), 0.7, 2)
    g.prop(DBV + "Drug", DBV + "dosage", pick(g, DBV + "Dosage"), 0.3)
    g.prop(DBV + "Drug", DBV + "salt", pick(g, DBV + "Salt"), 0.1)
    g.prop(DBV + "Drug", DCT + "source", lit(None, lambda r: "DrugBank 5.0"), 1.0)
    g.prop(DBV + "Target", RDFS_LABEL, lit("@en", text(1, 2)), 1.0)
    g.prop(DBV + "Target", DBV + "uniprot-id", lit(None, code("P", 10000, 99999)), 0.9)
    g.prop(DBV + "Target", DBV + "omim-phenotype", lit(None, code("OMIM:", 100000, 699999)), 0.5)
    g.prop(DBV + "Enzyme", DBV + "ec-number", lit(None, ec), 0.95)
    g.prop(DBV + "Enzyme", RDFS_LABEL, lit("@en", text(1, 2)), 1.0)
    g.prop(DBV + "Category", DCT + "title", lit(None, text(1, 2)), 1.0)
    g.prop(DBV + "Category", DBV + "mesh-id",
           ext("http://id.nlm.nih.gov/mesh/D%06d", 1, 99999), 0.6)
    g.prop(DBV + "Drug-Drug-Interaction", DBV + "drug1", pick(g, DBV + "Drug"), 1.0)
    g.prop(DBV + "Drug-Drug-Interaction", DBV + "drug2", pick(g, DBV + "Drug"), 1.0)
    g.prop(DBV + "Drug-Drug-Interaction", DCT + "description", lit("@en", text(4, 9)), 0.9)
    g.prop(DBV + "Dosage", DBV + "form", bnode(blank), 0.9)
    g.prop(DBV + "Dosage", DBV + "route", lit(None, lambda r: r.choice(["oral", "topical", "intravenous"])), 1.0)
    g.prop(DBV + "Mixture", DBV + "ingredient", pick(g, DBV + "Drug"), 1.0, 3)
    g.prop(DBV + "Mixture", RDFS_LABEL, lit("@en", text(1, 2)), 1.0)
    g.prop(DBV + "Salt", DBV + "cas-number", lit(None, code("", 10000, 999999)), 0.9)
    g.prop(DBV + "Patent", DBV + "country", lit(None, lambda r: r.choice(["US", "CA", "EP"])), 1.0)
    g.prop(DBV + "Patent", DBV + "approved",
           lit(XSD + "date", lambda r: "20%02d-%02d-%02d" % (r.randint(0, 18), r.randint(1, 12), r.randint(1, 28))), 1.0)

    # kegg, two releases
    for uri, scale, extra in [(G_KEGG3, 1.0, False), (G_KEGG4, 1.1, True)]:
        g = graphs[uri] = Graph(uri, rnd)
        n = lambda k: int(k * scale)
        g.cls(KV + "Drug", [KR + "D%05d" % i for i in range(1, n(200) + 1)])
        g.cls(KV + "Compound", [KR + "C%05d" % i for i in range(1, n(150) + 1)])
        g.cls(KV + "Enzyme", [KR + "E%05d" % i for i in range(1, n(80) + 1)])
        g.cls(KV + "Pathway", [KR + "map%05d" % i for i in range(1, 61)])
        g.cls(KV + "Orthology", [KR + "K%05d" % i for i in range(1, n(50) + 1)])
        g.prop(KV + "Drug", RDFS_LABEL, lit("@en", text(1, 3)), 1.0)
        g.prop(KV + "Drug", DCT + "title", lit(None, text(1, 4)), 0.9)
        g.prop(KV + "Drug", KV + "mol_weight", lit(XSD + "float", num(50, 900)), 0.8)
        g.prop(KV + "Drug", KV + "formula", lit(None, code("C", 1, 60)), 0.8)
        g.prop(KV + "Drug", KV + "pathway", pick(g, KV + "Pathway"), 0.5, 2)
        g.prop(KV + "Compound", KV + "mol_weight", lit(XSD + "float", num(20, 1200)), 0.9)
        g.prop(KV + "Compound", KV + "x-chebi", ext(OBO + "CHEBI_%d", 1, 90000), 0.6)
        g.prop(KV + "Enzyme", KV + "ec-code", lit(None, ec), 1.0)
        g.prop(KV + "Enzyme", KV + "orthology", pick(g, KV + "Orthology"), 0.7)
        g.prop(KV + "Pathway", DCT + "title", lit(None, text(2, 4)), 1.0)
        g.prop(KV + "Pathway", KV + "compound", pick(g, KV + "Compound"), 0.9, 3)
        g.prop(KV + "Orthology", KV + "gene-id", lit(None, code("hsa:", 1, 99999)), 0.9, 2)
        if not extra:
            g.cls(KV + "Disease", [KR + "H%05d" % i for i in range(1, 41)])
            g.cls(KV + "Glycan", [KR + "G%05d" % i for i in range(1, 31)])
            g.prop(KV + "Disease", KV + "omim", lit(None, code("", 100000, 699999)), 0.8)
            g.prop(KV + "Disease", KV + "pathway", pick(g, KV + "Pathway"), 0.6)
            g.prop(KV + "Glycan", KV + "exact-mass", lit(XSD + "float", num(100, 3000)), 0.9)
        else:
            g.cls(KV + "Disease", [KR + "H%05d" % i for i in range(1, 46)])
            g.cls(KV + "Reaction", [KR + "R%05d" % i for i in range(1, 61)])
            g.cls(KV + "Module", [KR + "M%05d" % i for i in range(1, 31)])
            g.prop(KV + "Disease", KV + "omim", lit(None, code("", 100000, 699999)), 0.8)
            g.prop(KV + "Reaction", KV + "equation", lit(None, text(3, 6)), 1.0)
            g.prop(KV + "Reaction", KV + "enzyme", pick(g, KV + "Enzyme"), 0.8)
            g.prop(KV + "Reaction", KV + "substrate", pick(g, KV + "Compound"), 1.0, 2)
            g.prop(KV + "Module", KV + "pathway", pick(g, KV + "Pathway"), 1.0)
            g.prop(KV + "Module", DCT + "source", ext("http://www.genome.jp/kegg/module/%d", 1, 3), 1.0)

    # chembl
    g = graphs[G_CHEMBL] = Graph(G_CHEMBL, rnd)
    g.cls(CH + "Substance", [CHR + "molecule/CHEMBL%d" % i for i in range(1, 201)])
    g.cls(CH + "SingleProtein", [CHR + "target/CHEMBL%d" % i for i in range(1001, 1101)])
    g.cls(CH + "TargetComponent", [CHR + "targetcomponent/CHEMBL_TC_%d" % i for i in range(1, 61)])
    g.cls(CH + "Assay", [CHR + "assay/CHEMBL%d" % i for i in range(2001, 2151)])
    g.cls(CH + "Activity", [CHR + "activity/CHEMBL_ACT_%d" % i for i in range(1, 301)])
    g.cls(CH + "Document", [CHR + "document/CHEMBL%d" % i for i in range(3001, 3081)])
    g.cls(CH + "CellLine", [CHR + "cellline/CHEMBL%d" % i for i in range(4001, 4031)])
    substances = g.instances[CH + "Substance"]
    for k, chebi in enumerate(["CHEBI_15377", "CHEBI_16236", "CHEBI_27732"]):
        g.cls(OBO + chebi, substances[k * 8:(k + 1) * 8])
    g.prop(CH + "Substance", RDFS_LABEL, lit("@en", text(1, 2)), 1.0)
    g.prop(CH + "Substance", CH + "hasMolecularWeight", lit(XSD + "double", num(50, 900)), 0.9)
    g.prop(CH + "Substance", CH + "moleculeXref",
           ext("http://identifiers.org/pubchem.compound/%d", 1, 99999), 0.5)
    g.prop(CH + "SingleProtein", CH + "hasTargetComponent", pick(g, CH + "TargetComponent"), 0.9, 2)
    g.prop(CH + "SingleProtein", CH + "targetType", lit(None, lambda r: "SINGLE PROTEIN"), 1.0)
    g.prop(CH + "SingleProtein", RDFS_LABEL, lit("@en", text(1, 3)), 1.0)
    g.prop(CH + "TargetComponent", CH + "hasEcNumber", lit(None, ec), 0.7)
    g.prop(CH + "TargetComponent", CH + "geneIdentifier", lit(XSD + "integer", integer(1, 99999)), 0.9)
    g.prop(CH + "TargetComponent", CH + "moldMarker", ext(MR + "marker/%d", 1, 120), 0.5)
    g.prop(CH + "Assay", CH + "hasTarget", pick(g, CH + "SingleProtein"), 0.9)
    g.prop(CH + "Assay", CH + "hasDocument", pick(g, CH + "Document"), 1.0)
    g.prop(CH + "Assay", CH + "hasCellLine", pick(g, CH + "CellLine"), 0.2)
    g.prop(CH + "Assay", CH + "assayType", lit(None, lambda r: r.choice("BFAPT")), 1.0)
    g.prop(CH + "Assay", DCT + "description", lit("@en", text(3, 8)), 0.8)
    g.prop(CH + "Activity", CH + "hasMolecule", pick(g, CH + "Substance"), 1.0)
    g.prop(CH + "Activity", CH + "hasAssay", pick(g, CH + "Assay"), 1.0)
    g.prop(CH + "Activity", CH + "standardValue", lit(XSD + "double", num(0.01, 10000, 3)), 0.9)
    g.prop(CH + "Activity", CH + "standardUnits", lit(None, lambda r: r.choice(["nM", "uM", "%"])), 0.9)
    g.prop(CH + "Document", DCT + "title", lit(None, text(4, 10)), 1.0)
    g.prop(CH + "Document", CH + "year", lit(XSD + "integer", integer(1980, 2018)), 1.0)
    g.prop(CH + "CellLine", CH + "cellosaurusId", lit(None, code("CVCL_", 1000, 9999)), 0.8)
    g.prop(CH + "CellLine", RDFS_LABEL, lit("@en", text(1, 2)), 1.0)

    # mold
    g = graphs[G_MOLD] = Graph(G_MOLD, rnd)
    g.cls(MV + "Strain", [MR + "strain/%d" % i for i in range(1, 41)])
    g.cls(MV + "Allele", [MR + "allele/%d" % i for i in range(1, 81)])
    g.cls(MV + "Marker", [MR + "marker/%d" % i for i in range(1, 121)])
    g.cls(MV + "Publication", [MR + "pub/%d" % i for i in range(1, 61)])
    g.cls(MV + "Observation", [MR + "obs/%d" % i for i in range(1, 151)])
    g.cls(SKOS + "Concept", [OBO + "GO_%07d" % i for i in range(8150, 8180)])
    g.prop(MV + "Strain", RDFS_LABEL, lit("@en", text(1, 2)), 1.0)
    g.prop(MV + "Allele", MV + "marker", pick(g, MV + "Marker"), 1.0)
    g.prop(MV + "Allele", MV + "strain", pick(g, MV + "Strain"), 0.7)
    g.prop(MV + "Marker", RDFS_LABEL, lit("@en", text(1, 2)), 1.0)
    g.prop(MV + "Marker", MV + "entrezGeneId", lit(XSD + "integer", integer(1, 99999)), 0.85)
    g.prop(MV + "Marker", MV + "markerType", lit(None, lambda r: r.choice(["Gene", "QTL", "Pseudogene"])), 1.0)
    g.prop(MV + "Marker", MV + "keggPathway", ext(KR + "map%05d", 1, 60), 0.4)
    g.prop(MV + "Publication", DCT + "title", lit(None, text(4, 10)), 1.0)
    g.prop(MV + "Publication", MV + "pubYear", lit(XSD + "gYear", integer(1990, 2018)), 1.0)
    g.prop(MV + "Observation", MV + "allele", pick(g, MV + "Allele"), 1.0)
    g.prop(MV + "Observation", MV + "phenotypeOmim", lit(None, code("", 100000, 699999)), 0.6)
    g.prop(MV + "Observation", MV + "annotation", pick(g, SKOS + "Concept"), 0.8, 2)
    g.prop(MV + "Observation", MV + "ageAtOnset", lit(OBO + "UO_0000034", integer(1, 40)), 0.5)
    g.prop(MV + "Observation", MV + "reference", pick(g, MV + "Publication"), 0.9)
    g.prop(SKOS + "Concept", SKOS + "prefLabel", lit("@en", text(1, 3)), 1.0)

    for guri, labels in ENDPOINT_LABELS.items():
        for uri, label in labels:
            graphs[guri].add(("iri", uri), RDFS_LABEL, ("lit", label, "@en"))
    return graphs


def render_term(t):
    kind = t[0]
    if kind == "iri":
        return "<%s>" % t[1]
    if kind == "bnode":
        return "_:%s" % t[1]
    value = t[1].replace("\\", "\\\\").replace('"', '\\"')
    if t[2] is None:
        return '"%s"' % value
    if t[2].startswith("@"):
        return '"%s"%s' % (value, t[2])
    return '"%s"^^<%s>' % (value, t[2])


def enumerate_graph(g):
    """Brute-force classes and realizations of one graph."""
    types = defaultdict(set)
    for s, p, o in g.quads:
        if p == RDF_TYPE:
            types[s[1]].add(o[1])
    classes = defaultdict(int)
    for subject_types in types.values():
        for c in subject_types:
            classes[c] += 1
    realizations = defaultdict(int)
    for s, p, o in g.quads:
        if p == RDF_TYPE or s[1] not in types:
            continue
        if o[0] == "lit":
            dt = o[2]
            ranges = [("datatype", XSD + "string" if dt is None else RDF_LANG if dt.startswith("@") else dt)]
        elif o[0] == "iri" and o[1] in types:
            ranges = [("class", c) for c in sorted(types[o[1]])]
        else:
            ranges = [("anonymous", None)]
        for c in types[s[1]]:
            for r in ranges:
                realizations[(c, p) + r] += 1
    return classes, realizations


def split_label(local):
    tokens = []
    for chunk in re.split(r"[-_\s]", local):
        start = 0
        for i in range(1, len(chunk)):
            prev, cur = chunk[i - 1], chunk[i]
            nxt = chunk[i + 1] if i + 1 < len(chunk) else ""
            if ((prev.islower() or prev.isdigit()) and cur.isupper()) or (
                prev.isupper() and cur.isupper() and nxt.islower()
            ):
                tokens.append(chunk[start:i])
                start = i
        if start < len(chunk):
            tokens.append(chunk[start:])
    return " ".join(t[:1].upper() + t[1:].lower() for t in tokens if t)


def local_name(uri):
    return uri[max(uri.rfind("/"), uri.rfind("#"), uri.rfind(":")) + 1:]


def tokenize(label):
    return "".join(c for c in label.lower() if c not in string.punctuation).split()


def schema_elements(per_graph):
    """(source, uri) pairs of classes and properties, with their labels."""
    elements = {}
    endpoint_labels = {uri: label for labels in ENDPOINT_LABELS.values() for uri, label in labels}
    for guri, (classes, realizations) in per_graph.items():
        src = SOURCE_OF[guri]
        uris = set(classes) | {k[1] for k in realizations}
        for u in uris:
            elements[(src, u)] = endpoint_labels.get(u) or split_label(local_name(u)) or u
    return elements


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def build_embeddings(rnd, vocabulary):
    vectors, idf = {}, {}
    family_dim = {w: d for d, fam in enumerate(FAMILY_WORDS) for w in FAMILY_WORDS[fam]}
    for w in sorted(vocabulary):
        if w in OOV_WORDS:
            continue
        if w in family_dim:
            v = [0.0] * DIM
            v[family_dim[w]] = 1.0
            for d in range(4, DIM):
                v[d] = rnd.uniform(-0.05, 0.05)
            idf[w] = 3.0
        else:
            v = [rnd.uniform(-0.05, 0.05) for _ in range(4)] + [rnd.gauss(0, 1) for _ in range(DIM - 4)]
            idf[w] = 0.2 if w in GENERIC_WORDS else round(rnd.uniform(1.0, 2.5), 3)
        vectors[w] = [round(x, 6) for x in unit(v)]
    return vectors, idf


def embed(label, vectors, idf):
    default_vec = [sum(vectors[w][d] for w in sorted(vectors)) / len(vectors) for d in range(DIM)]
    default_idf = max(idf.values())
    total, weight = [0.0] * DIM, 0.0
    for t in tokenize(label):
        w = idf.get(t, default_idf)
        vec = vectors.get(t, default_vec)
        total = [a + w * b for a, b in zip(total, vec)]
        weight += w
    return [x / weight for x in total]


def cos(a, b):
    return sum(x * y for x, y in zip(a, b)) / math.sqrt(sum(x * x for x in a) * sum(y * y for y in b))


def greedy_edges(elements, vectors, idf, threshold):
    emb = {k: embed(v, vectors, idf) for k, v in elements.items()}
    by_source = defaultdict(list)
    for k in sorted(emb):
        by_source[k[0]].append(k)
    edges = []
    sources = sorted(by_source)
    for i, a in enumerate(sources):
        for b in sources[i + 1:]:
            cands = []
            for x in by_source[a]:
                for y in by_source[b]:
                    s = cos(emb[x], emb[y])
                    if s >= threshold:
                        cands.append((-s, x[1], y[1], x, y))
            cands.sort()
            used = set()
            for neg, _, _, x, y in cands:
                if x in used or y in used:
                    continue
                used.update([x, y])
                edges.append((x, y, -neg))
    return edges


def check_families(edges):
    members = {(s, u): fam for fam, s, u, _ in FAMILIES}
    for fam in FAMILY_WORDS:
        want = {(s, u) for f, s, u, _ in FAMILIES if f == fam}
        got = {frozenset([x, y]) for x, y, _ in edges if x in want and y in want}
        assert len(got) == 3, (fam, got)
    for x, y, s in edges:
        fx, fy = members.get(x), members.get(y)
        assert fx == fy, ("cross-family edge", x, y, s)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "cloud"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    graphs = build(args.seed)
    for endpoint, guris in ENDPOINTS.items():
        with open(os.path.join(args.out, endpoint + ".nq"), "w") as f:
            f.write("# synthetic fixture, endpoint %s, seed %d\n" % (endpoint, args.seed))
            for guri in guris:
                for s, p, o in graphs[guri].quads:
                    f.write("%s <%s> %s <%s> .\n" % (render_term(s), p, render_term(o), guri))

    per_graph = {guri: enumerate_graph(g) for guri, g in graphs.items()}
    elements = schema_elements(per_graph)
    for fam, src, uri, label in FAMILIES:
        assert elements[(src, uri)] == label, (src, uri, elements.get((src, uri)))
    vocabulary = {t for label in elements.values() for t in tokenize(label)}
    vectors, idf = build_embeddings(random.Random(args.seed + 1), vocabulary)
    edges = greedy_edges(elements, vectors, idf, 0.75)
    check_families(edges)

    with open(os.path.join(args.out, "vectors.txt"), "w") as f:
        f.write("%d %d\n" % (len(vectors), DIM))
        for w in sorted(vectors):
            f.write("%s %s\n" % (w, " ".join("%.6f" % x for x in vectors[w])))
    with open(os.path.join(args.out, "idf.txt"), "w") as f:
        for w in sorted(idf):
            f.write("%s %s\n" % (w, idf[w]))

    with open(os.path.join(args.out, "graph_rules.tsv"), "w") as f:
        f.write("pattern\tsource_id\n")
        f.write("^http://bio2rdf\\.org/(\\w+)_resource:bio2rdf\\.dataset\\.\\w+\\.R\\d+$\t$1\n")
        f.write("^http://rdf\\.ebi\\.ac\\.uk/dataset/chembl/\tchembl\n")
        f.write("^http://rdf\\.example\\.org/mold/graph/\tmold\n")

    kinds = defaultdict(lambda: defaultdict(set))
    for guri, (classes, realizations) in per_graph.items():
        for src in (SOURCE_OF[guri], "total"):
            kinds[src]["classes"].update(classes)
            for c, p, rk, r in realizations:
                if rk == "datatype":
                    kinds[src]["data_properties"].add(p)
                    kinds[src]["datatypes"].add(r)
                else:
                    kinds[src]["object_properties"].add(p)
                if rk == "class":
                    kinds[src]["classes"].add(r)
    kinds_of = defaultdict(set)
    for kind, uris in kinds["total"].items():
        for u in uris:
            kinds_of[u].add(kind)
    overlap = sorted(u for u, ks in kinds_of.items() if len(ks) > 1)
    manifest = {
        "seed": args.seed,
        "endpoints": {e: {"file": e + ".nq", "graphs": g} for e, g in ENDPOINTS.items()},
        "graphs": {
            guri: {
                "source": SOURCE_OF[guri],
                "classes": dict(sorted(classes.items())),
                "realizations": [
                    {"domain": c, "property": p, "range_kind": rk, "range": r, "count": n}
                    for (c, p, rk, r), n in sorted(realizations.items(), key=lambda kv: tuple(x or "" for x in kv[0]))
                ],
            }
            for guri, (classes, realizations) in sorted(per_graph.items())
        },
        "stats": {
            src: {k: len(kinds[src][k]) for k in ("classes", "object_properties", "data_properties", "datatypes")}
            for src in sorted(kinds)
        },
        "overlap": overlap,
        "families": {
            fam: [{"source": s, "uri": u, "label": l} for f, s, u, l in FAMILIES if f == fam]
            for fam in FAMILY_WORDS
        },
        "planted_links": [["drugbank", "kegg"], ["chembl", "mold"], ["kegg", "mold"]],
        "similarity_edges_at_0.75": len(edges),
    }
    with open(os.path.join(args.out, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=False)
        f.write("\n")

    n_classes = sum(len(c) for c, _ in per_graph.values())
    n_real = sum(len(r) for _, r in per_graph.values())
    n_quads = sum(len(g.quads) for g in graphs.values())
    print("graphs=%d classes=%d realizations=%d quads=%d similarity_edges=%d"
          % (len(graphs), n_classes, n_real, n_quads, len(edges)))


if __name__ == "__main__":
    main()
