"""Instance file format.

Plain-text sections, `#` comments, whitespace-separated fields:

    [nodes]
    <id> <supply|demand|transmission>
    [links]
    <id> <tail> <head> <weight> <capacity>
    [injections]
    <node> <value>
    [initial_outages]
    <link id> ...

Node roles must match the injection signs.  `emit` followed by `parse` is the
identity up to float formatting.
"""

from __future__ import annotations


from .cascade import NetworkState
from .network import Network


class ParseError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


_SECTIONS = ("nodes", "links", "injections", "initial_outages")


def parse_instance(text: str):
    """(Network, initial NetworkState) from the instance format above."""
    nodes, links, weights, caps, roles = [], [], {}, {}, {}
    injections, outages = {}, []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ParseError(lineno, f"unknown section [{section}]")
            continue
        if section is None:
            raise ParseError(lineno, "content before the first section")
        parts = line.split()
        try:
            if section == "nodes":
                nid, role = parts
                nodes.append(nid)
                roles[nid] = role.lower()
            elif section == "links":
                lid, tail, head, w, c = parts
                links.append((lid, tail, head))
                weights[lid] = float(w)
                caps[lid] = float(c)
            elif section == "injections":
                nid, val = parts
                injections[nid] = float(val)
            else:
                outages.extend(parts)
        except (ValueError, TypeError) as exc:
            raise ParseError(lineno, f"cannot parse {section} entry: {exc}")
    if not nodes:
        raise ParseError(0, "no [nodes] section")
    try:
        net = Network(nodes, links, weights, caps, roles)
    except ValueError as exc:
        raise ParseError(0, str(exc))
    for nid, val in injections.items():
        if nid not in roles:
            raise ParseError(0, f"injection on unknown node {nid}")
        want = "supply" if val > 0 else ("demand" if val < 0 else None)
        if want is not None and roles[nid] != want:
            raise ParseError(0, f"node {nid}: role {roles[nid]} contradicts injection {val}")
    for lid in outages:
        if lid not in weights:
            raise ParseError(0, f"outage of unknown link {lid}")
    p = net.p_vector(injections)
    active = net.all_links() - frozenset(outages)
    return net, NetworkState.make(net, active, p)


def emit_instance(net: Network, state: NetworkState) -> str:
    out = ["[nodes]"]
    for n in net.nodes:
        out.append(f"{n} {net.roles[n]}")
    out.append("")
    out.append("[links]")
    for l in net.links:
        out.append(
            f"{l.lid} {l.tail} {l.head} {net.weights[l.lid]!r} {net.capacities[l.lid]!r}"
        )
    out.append("")
    out.append("[injections]")
    p = state.p_array()
    for n in net.nodes:
        v = float(p[net.node_index[n]])
        if v != 0.0:
            out.append(f"{n} {v!r}")
    outages = sorted(net.all_links() - state.active)
    if outages:
        out.append("")
        out.append("[initial_outages]")
        out.append(" ".join(outages))
    return "\n".join(out) + "\n"


def load_instance(path_or_name: str):
    """Instance from a bundled name or a file path."""
    from . import instances

    if path_or_name in instances.BUILTIN:
        return instances.get(path_or_name)
    with open(path_or_name) as fh:
        return parse_instance(fh.read())
