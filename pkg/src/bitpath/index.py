"""Edge-id and bit-vector indexes built in two DFS passes, plus disk format.

The forward pass walks from the roots, hands every freshly traversed edge
the next sequential id (starting at 1; bit position = id - 1), and freezes
each node's accumulated successor-edge set when the node pops off the DFS
stack.  A finished node reached again contributes its frozen vector with one
word-wise OR instead of a re-traversal.  The backward pass mirrors this from
the leaves over reversed edges, looking ids up in the map the first pass
produced.  Per-label vectors fall out of id assignment as a side effect and
stay plain: their interleaved bits defeat run-length coding.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .bitvec import CompressedBitVector, word_count
from .graph import CollapsedGraph, CycleError, LabeledGraph, NameTable

MAGIC = b"BPTH"
VERSION = 1

_FILE_HEADER = struct.Struct("<4sHQI")  # magic, version, payload length, crc32
_SECTION_ENTRY = struct.Struct("<IQQ")

_SEC_COUNTS = 1
_SEC_ORIG_NAMES = 2
_SEC_REPR_NAMES = 3
_SEC_LABELS = 4
_SEC_SCC_MAP = 5
_SEC_EID = 6
_SEC_NSUCC = 7
_SEC_NPRED = 8
_SEC_ELID = 9

_SECTION_ORDER = [
    _SEC_COUNTS,
    _SEC_ORIG_NAMES,
    _SEC_REPR_NAMES,
    _SEC_LABELS,
    _SEC_SCC_MAP,
    _SEC_EID,
    _SEC_NSUCC,
    _SEC_NPRED,
    _SEC_ELID,
]

SECTION_NAMES = {
    _SEC_COUNTS: "counts",
    _SEC_ORIG_NAMES: "node-names",
    _SEC_REPR_NAMES: "collapsed-names",
    _SEC_LABELS: "labels",
    _SEC_SCC_MAP: "scc-map",
    _SEC_EID: "eid",
    _SEC_NSUCC: "n-succ-e",
    _SEC_NPRED: "n-pred-e",
    _SEC_ELID: "el-id",
}


class IndexFormatError(ValueError):
    """Unreadable or inconsistent index file."""


class BitPathIndex:
    """The four indexes over one collapsed graph.

    ``eid_edges[i]`` is the (tail, head, label) triple of edge id ``i + 1``;
    every per-node and per-label vector addresses bit position ``id - 1``.
    """

    def __init__(
        self,
        graph_ref: CollapsedGraph,
        eid_edges: list[tuple[int, int, int]],
        n_succ_e: list[CompressedBitVector],
        n_pred_e: list[CompressedBitVector],
        el_id: list[CompressedBitVector],
    ):
        self.graph_ref = graph_ref
        self.eid_edges = eid_edges
        self.eid = {triple: i + 1 for i, triple in enumerate(eid_edges)}
        self.n_succ_e = n_succ_e
        self.n_pred_e = n_pred_e
        self.el_id = el_id

    @property
    def universe(self) -> int:
        return len(self.eid_edges)

    def edge_of(self, edge_id: int) -> tuple[int, int, int]:
        return self.eid_edges[edge_id - 1]

    def id_of(self, tail: int, head: int, label: int) -> int:
        return self.eid[(tail, head, label)]


def _set_bit(words: np.ndarray, pos: int) -> None:
    words[pos >> 6] |= np.uint64(1 << (pos & 63))


def build_forward(
    cg: CollapsedGraph,
) -> tuple[list[tuple[int, int, int]], list[CompressedBitVector], list[CompressedBitVector]]:
    """Forward DFS pass: edge ids, successor vectors, per-label vectors."""
    n = cg.base.node_count
    universe = cg.base.edge_count
    n_words = word_count(universe)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * n
    succ: list[CompressedBitVector | None] = [None] * n
    eid_edges: list[tuple[int, int, int]] = []
    label_positions: list[list[int]] = [[] for _ in range(len(cg.labels))]

    for root in cg.roots:
        if color[root] != WHITE:
            continue
        color[root] = GRAY
        node_stack = [root]
        iter_stack = [0]
        acc_stack = [np.zeros(n_words, dtype=np.uint64)]
        while node_stack:
            v = node_stack[-1]
            out = cg.out_edges_sorted[v]
            i = iter_stack[-1]
            if i < len(out):
                iter_stack[-1] += 1
                label, head = out[i]
                pos = len(eid_edges)  # bit position; edge id is pos + 1
                eid_edges.append((v, head, label))
                _set_bit(acc_stack[-1], pos)
                label_positions[label].append(pos)
                if head == v:
                    continue
                state = color[head]
                if state == WHITE:
                    color[head] = GRAY
                    node_stack.append(head)
                    iter_stack.append(0)
                    acc_stack.append(np.zeros(n_words, dtype=np.uint64))
                elif state == BLACK:
                    acc_stack[-1] |= succ[head].decoded_words()
                else:
                    raise CycleError(
                        f"non-self cycle through node {head} in collapsed graph"
                    )
            else:
                node_stack.pop()
                iter_stack.pop()
                acc = acc_stack.pop()
                color[v] = BLACK
                succ[v] = CompressedBitVector.from_words(acc, universe)
                if acc_stack:
                    acc_stack[-1] |= acc

    if any(c != BLACK for c in color) or len(eid_edges) != universe:
        raise CycleError("forward pass did not cover the graph; condensation is broken")
    el_id = [
        CompressedBitVector.from_positions(positions, universe, compress=False)
        for positions in label_positions
    ]
    return eid_edges, succ, el_id


def build_backward(
    cg: CollapsedGraph, eid: dict[tuple[int, int, int], int]
) -> list[CompressedBitVector]:
    """Backward DFS pass from the leaves, reusing the forward pass's ids."""
    n = cg.base.node_count
    universe = cg.base.edge_count
    n_words = word_count(universe)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * n
    pred: list[CompressedBitVector | None] = [None] * n

    for leaf in cg.leaves:
        if color[leaf] != WHITE:
            continue
        color[leaf] = GRAY
        node_stack = [leaf]
        iter_stack = [0]
        acc_stack = [np.zeros(n_words, dtype=np.uint64)]
        while node_stack:
            v = node_stack[-1]
            incoming = cg.in_edges_sorted[v]
            i = iter_stack[-1]
            if i < len(incoming):
                iter_stack[-1] += 1
                label, tail = incoming[i]
                _set_bit(acc_stack[-1], eid[(tail, v, label)] - 1)
                if tail == v:
                    continue
                state = color[tail]
                if state == WHITE:
                    color[tail] = GRAY
                    node_stack.append(tail)
                    iter_stack.append(0)
                    acc_stack.append(np.zeros(n_words, dtype=np.uint64))
                elif state == BLACK:
                    acc_stack[-1] |= pred[tail].decoded_words()
                else:
                    raise CycleError(
                        f"non-self cycle through node {tail} in collapsed graph"
                    )
            else:
                node_stack.pop()
                iter_stack.pop()
                acc = acc_stack.pop()
                color[v] = BLACK
                pred[v] = CompressedBitVector.from_words(acc, universe)
                if acc_stack:
                    acc_stack[-1] |= acc

    if any(c != BLACK for c in color):
        raise CycleError("backward pass did not cover the graph; condensation is broken")
    return pred


def build_index(cg: CollapsedGraph) -> BitPathIndex:
    eid_edges, n_succ_e, el_id = build_forward(cg)
    eid = {triple: i + 1 for i, triple in enumerate(eid_edges)}
    n_pred_e = build_backward(cg, eid)
    return BitPathIndex(cg, eid_edges, n_succ_e, n_pred_e, el_id)


def _pack_names(names: list[str]) -> bytes:
    out = bytearray()
    for name in names:
        raw = name.encode("utf-8")
        out += struct.pack("<I", len(raw))
        out += raw
    return bytes(out)


def _unpack_names(buf: bytes, count: int) -> list[str]:
    names = []
    off = 0
    for _ in range(count):
        if off + 4 > len(buf):
            raise IndexFormatError("truncated name table")
        (length,) = struct.unpack_from("<I", buf, off)
        off += 4
        if off + length > len(buf):
            raise IndexFormatError("truncated name table entry")
        names.append(buf[off : off + length].decode("utf-8"))
        off += length
    if off != len(buf):
        raise IndexFormatError("trailing bytes in name table")
    return names


def _pack_vectors(vectors: list[CompressedBitVector]) -> bytes:
    offsets = []
    blobs = []
    off = 0
    for v in vectors:
        offsets.append(off)
        blob = v.to_bytes()
        blobs.append(blob)
        off += len(blob)
    head = struct.pack("<Q", len(vectors)) + b"".join(
        struct.pack("<Q", o) for o in offsets
    )
    return head + b"".join(blobs)


def _unpack_vectors(buf: bytes, expected_count: int, universe: int) -> list[CompressedBitVector]:
    if len(buf) < 8:
        raise IndexFormatError("truncated vector section")
    (count,) = struct.unpack_from("<Q", buf, 0)
    if count != expected_count:
        raise IndexFormatError(f"vector section holds {count} entries, expected {expected_count}")
    table_end = 8 + 8 * count
    if len(buf) < table_end:
        raise IndexFormatError("truncated vector offset table")
    offsets = list(struct.unpack_from(f"<{count}Q", buf, 8)) if count else []
    vectors = []
    cursor = table_end
    for i, off in enumerate(offsets):
        if table_end + off != cursor:
            raise IndexFormatError(f"vector {i} offset is inconsistent")
        vec, cursor = CompressedBitVector.from_bytes(buf, cursor)
        if vec.universe_size != universe:
            raise IndexFormatError(
                f"vector {i} universe {vec.universe_size} does not match edge count {universe}"
            )
        vectors.append(vec)
    if cursor != len(buf):
        raise IndexFormatError("trailing bytes in vector section")
    return vectors


def save_index(idx: BitPathIndex, path: str) -> int:
    """Write the index; returns the file size in bytes."""
    cg = idx.graph_ref
    counts = struct.pack(
        "<5Q",
        len(cg.orig_nodes),
        cg.base.node_count,
        len(cg.labels),
        idx.universe,
        cg.multi_scc_count,
    )
    eid_blob = b"".join(struct.pack("<3Q", *triple) for triple in idx.eid_edges)
    sections = {
        _SEC_COUNTS: counts,
        _SEC_ORIG_NAMES: _pack_names(cg.orig_nodes.names),
        _SEC_REPR_NAMES: _pack_names(cg.base.nodes.names),
        _SEC_LABELS: _pack_names(cg.labels.names),
        _SEC_SCC_MAP: struct.pack(f"<{len(cg.scc_map)}Q", *cg.scc_map),
        _SEC_EID: eid_blob,
        _SEC_NSUCC: _pack_vectors(idx.n_succ_e),
        _SEC_NPRED: _pack_vectors(idx.n_pred_e),
        _SEC_ELID: _pack_vectors(idx.el_id),
    }
    table_size = 4 + _SECTION_ENTRY.size * len(_SECTION_ORDER)
    payload = bytearray(struct.pack("<I", len(_SECTION_ORDER)))
    offset = table_size
    for sec_id in _SECTION_ORDER:
        payload += _SECTION_ENTRY.pack(sec_id, offset, len(sections[sec_id]))
        offset += len(sections[sec_id])
    for sec_id in _SECTION_ORDER:
        payload += sections[sec_id]
    blob = _FILE_HEADER.pack(MAGIC, VERSION, len(payload), zlib.crc32(payload)) + payload
    with open(path, "wb") as fh:
        fh.write(blob)
    return len(blob)


def read_section_sizes(path: str) -> dict[str, int]:
    """Per-section byte sizes of an index file (for the stats report)."""
    with open(path, "rb") as fh:
        data = fh.read()
    payload = _check_envelope(data)
    return {
        SECTION_NAMES[sec_id]: length
        for sec_id, _, length in _parse_section_table(payload)
    }


def _check_envelope(data: bytes) -> bytes:
    if len(data) < _FILE_HEADER.size:
        raise IndexFormatError("truncated file header")
    magic, version, payload_len, crc = _FILE_HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise IndexFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise IndexFormatError(f"unsupported version {version}")
    payload = data[_FILE_HEADER.size :]
    if len(payload) != payload_len:
        raise IndexFormatError(
            f"payload length {len(payload)} does not match header {payload_len}"
        )
    if zlib.crc32(payload) != crc:
        raise IndexFormatError("payload checksum mismatch")
    return payload


def _parse_section_table(payload: bytes) -> list[tuple[int, int, int]]:
    if len(payload) < 4:
        raise IndexFormatError("truncated section table")
    (count,) = struct.unpack_from("<I", payload, 0)
    table_end = 4 + _SECTION_ENTRY.size * count
    if len(payload) < table_end:
        raise IndexFormatError("truncated section table")
    entries = []
    for i in range(count):
        sec_id, offset, length = _SECTION_ENTRY.unpack_from(payload, 4 + _SECTION_ENTRY.size * i)
        if offset + length > len(payload):
            raise IndexFormatError(f"section {sec_id} extends past the payload")
        entries.append((sec_id, offset, length))
    return entries


def load_index(path: str) -> BitPathIndex:
    with open(path, "rb") as fh:
        data = fh.read()
    payload = _check_envelope(data)
    table = {sec_id: (off, length) for sec_id, off, length in _parse_section_table(payload)}
    missing = [sid for sid in _SECTION_ORDER if sid not in table]
    if missing:
        raise IndexFormatError(f"missing sections: {missing}")

    def section(sec_id: int) -> bytes:
        off, length = table[sec_id]
        return payload[off : off + length]

    counts_blob = section(_SEC_COUNTS)
    if len(counts_blob) != 40:
        raise IndexFormatError("counts section has the wrong size")
    orig_count, coll_count, label_count, edge_count, multi_scc = struct.unpack("<5Q", counts_blob)

    orig_names = _unpack_names(section(_SEC_ORIG_NAMES), orig_count)
    repr_names = _unpack_names(section(_SEC_REPR_NAMES), coll_count)
    label_names = _unpack_names(section(_SEC_LABELS), label_count)
    for kind, names in (("node", orig_names), ("collapsed node", repr_names), ("label", label_names)):
        if len(set(names)) != len(names):
            raise IndexFormatError(f"duplicate {kind} name in dictionary")

    scc_blob = section(_SEC_SCC_MAP)
    if len(scc_blob) != 8 * orig_count:
        raise IndexFormatError("scc map section has the wrong size")
    scc_map = list(struct.unpack(f"<{orig_count}Q", scc_blob)) if orig_count else []
    if any(c >= coll_count for c in scc_map):
        raise IndexFormatError("scc map references an unknown collapsed node")

    eid_blob = section(_SEC_EID)
    if len(eid_blob) != 24 * edge_count:
        raise IndexFormatError("eid section has the wrong size")
    eid_edges = []
    for i in range(edge_count):
        tail, head, label = struct.unpack_from("<3Q", eid_blob, 24 * i)
        if tail >= coll_count or head >= coll_count or label >= label_count:
            raise IndexFormatError(f"edge id {i + 1} references unknown ids")
        eid_edges.append((tail, head, label))

    base = LabeledGraph()
    base.nodes = NameTable(repr_names)
    base.labels = NameTable(label_names)
    for triple in eid_edges:
        if not base.add_edge_ids(*triple):
            raise IndexFormatError("duplicate edge triple in eid section")
    try:
        cg = CollapsedGraph(NameTable(orig_names), base, scc_map, multi_scc)
    except CycleError as exc:
        raise IndexFormatError(f"stored graph is not a valid condensation: {exc}") from exc

    n_succ = _unpack_vectors(section(_SEC_NSUCC), coll_count, edge_count)
    n_pred = _unpack_vectors(section(_SEC_NPRED), coll_count, edge_count)
    el_id = _unpack_vectors(section(_SEC_ELID), label_count, edge_count)
    return BitPathIndex(cg, eid_edges, n_succ, n_pred, el_id)
