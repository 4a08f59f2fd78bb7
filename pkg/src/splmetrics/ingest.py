"""Loading products: neutral model files and C-like source trees.

Two ingestion paths produce :class:`~splmetrics.model.Product` values:

- product model files (YAML, ``format_version: "1"``): a product header
  plus a component list, each component carrying ports and either an
  explicit token list or a ``source`` string run through the tokenizer;
- C source trees: every top-level function definition becomes one
  component of kind "function" (parameters and return type become ports,
  the tokenized body becomes the content multiset).

Normalization is applied here, once, for every path: comments stripped,
whitespace collapsed, identifiers lowercased, operator and punctuation
tokens kept. The C scanner is a pragmatic brace-matcher, not a grammar;
preprocessor directives are opaque single tokens, K&R definitions and
attribute-decorated signatures are not recognized. Files that defeat the
scanner are reported and skipped.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from pathlib import Path

import yaml

from .errors import ExtractionError, ParseError, TokenizeError, ValidationError
from .model import Component, Port, Product

log = logging.getLogger(__name__)

FORMAT_VERSION = "1"
DEFAULT_SOURCE_EXTENSIONS = (".c", ".h")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_IDENT_ONLY = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_FN_POINTER = re.compile(r"\(\s*\*+\s*([A-Za-z_][A-Za-z0-9_]*)\s*\)\s*\(")

# longest-match-first operator table; single chars fall through
_OPERATORS = ("<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=",
              "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=",
              "|=", "^=", "##")

_TYPE_KEYWORDS = frozenset("""
    void char short int long float double signed unsigned const volatile
    struct union enum register restrict static inline
""".split())

_CONTROL_KEYWORDS = frozenset(
    "if else for while do switch case return sizeof goto".split())


# ---------------------------------------------------------------------------
# tokenization

def _position(text: str, index: int) -> tuple[int, int]:
    line = text.count("\n", 0, index) + 1
    column = index - text.rfind("\n", 0, index)
    return line, column


def _scan_literal(text: str, start: int) -> int:
    """End index (exclusive) of the string/char literal opening at `start`.

    An unterminated literal ends at the line break (or end of input);
    literals never span lines.
    """
    quote = text[start]
    i = start + 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1
        if c == "\n":
            return i
        i += 1
    return n


def strip_comments(text: str, origin: str = "<source>") -> str:
    """Replace comments with spaces, preserving newlines and literals."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            if j == -1:
                j = n
            out.append(" " * (j - i))
            i = j
        elif c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            if j == -1:
                line, column = _position(text, i)
                raise TokenizeError("unterminated block comment",
                                    source=origin, line=line, column=column)
            segment = text[i:j + 2]
            out.append("".join("\n" if ch == "\n" else " " for ch in segment))
            i = j + 2
        elif c in "\"'":
            j = _scan_literal(text, i)
            out.append(text[i:j])
            i = j
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _scan_number(line: str, start: int) -> int:
    # pp-number-ish: digits, letters, dots, underscores, exponent signs
    i = start + 1
    n = len(line)
    while i < n:
        c = line[i]
        if c.isalnum() or c in "._":
            i += 1
        elif c in "+-" and line[i - 1] in "eEpP":
            i += 1
        else:
            break
    return i


def _tokenize_line(line: str, out: Counter) -> None:
    i = 0
    n = len(line)
    while i < n:
        c = line[i]
        if c.isspace():
            i += 1
            continue
        if c in "\"'":
            j = _scan_literal(line, i)
            out[line[i:j]] += 1
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (line[j].isalnum() or line[j] == "_"):
                j += 1
            out[line[i:j].lower()] += 1
            i = j
            continue
        if c.isdigit() or (c == "." and i + 1 < n and line[i + 1].isdigit()):
            j = _scan_number(line, i)
            out[line[i:j]] += 1
            i = j
            continue
        for op in _OPERATORS:
            if line.startswith(op, i):
                out[op] += 1
                i += len(op)
                break
        else:
            out[c] += 1
            i += 1


def tokenize(source: str, origin: str = "<source>") -> Counter:
    """Normalized token multiset of a source text.

    Comments are stripped, whitespace collapsed, identifiers lowercased.
    Preprocessor directives (with continuations joined) become one opaque
    token each. Raises TokenizeError for an unterminated block comment.
    """
    clean = strip_comments(source, origin)
    tokens: Counter = Counter()
    lines = clean.split("\n")
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if stripped.startswith("#"):
            parts = [stripped]
            while parts[-1].endswith("\\") and i + 1 < len(lines):
                parts[-1] = parts[-1][:-1]
                i += 1
                parts.append(lines[i].strip())
            tokens[" ".join(" ".join(parts).split())] += 1
        else:
            _tokenize_line(lines[i], tokens)
        i += 1
    return tokens


def render_tokens(tokens: Counter) -> str:
    """One token per line, sorted; tokenize() of the result reproduces
    the multiset."""
    return "\n".join(sorted(tokens.elements()))


def normalize_token(token: str) -> str:
    """Normalization for explicitly listed tokens: identifiers lowercase."""
    if _IDENT_ONLY.match(token):
        return token.lower()
    return token


# ---------------------------------------------------------------------------
# product model files (format_version "1")

def parse_product_model(data: str | bytes, source: str = "<input>") -> Product:
    """Parse a product model document; returns a validated Product."""
    try:
        doc = yaml.safe_load(data)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ParseError(
            str(exc.problem or exc), source=source,
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None) from None
    except yaml.YAMLError as exc:
        raise ParseError(str(exc), source=source) from None
    return _product_from_document(doc, source)


def load_product_model(path) -> Product:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc}", source=str(path)) from None
    return parse_product_model(data, source=str(path))


def _fail(source: str, message: str):
    raise ValidationError(f"{source}: {message}")


def _product_from_document(doc, source: str) -> Product:
    if not isinstance(doc, dict):
        _fail(source, "product model must be a mapping")
    version = doc.get("format_version")
    if str(version) != FORMAT_VERSION:
        _fail(source, f"unsupported format_version {version!r} "
                      f"(expected {FORMAT_VERSION!r})")
    header = doc.get("product")
    if not isinstance(header, dict) or not header.get("id"):
        _fail(source, "missing product header with an id")
    raw_components = doc.get("components")
    if not isinstance(raw_components, list) or not raw_components:
        _fail(source, "components must be a non-empty list")

    components = []
    seen_ids = set()
    for position, entry in enumerate(raw_components):
        if not isinstance(entry, dict):
            _fail(source, f"component #{position + 1} must be a mapping")
        cid = entry.get("id")
        if not cid:
            _fail(source, f"component #{position + 1} is missing an id")
        cid = str(cid)
        if cid in seen_ids:
            _fail(source, f"duplicate component id {cid!r}")
        seen_ids.add(cid)
        kind = entry.get("kind")
        if not kind:
            _fail(source, f"component {cid!r} is missing a kind")

        has_tokens = "tokens" in entry
        has_source = "source" in entry
        if has_tokens == has_source:
            _fail(source, f"component {cid!r} must have exactly one of "
                          f"'tokens' or 'source'")
        if has_tokens:
            raw = entry["tokens"]
            if not isinstance(raw, list):
                _fail(source, f"component {cid!r}: tokens must be a list")
            tokens = Counter(normalize_token(str(t)) for t in raw)
        else:
            raw = entry["source"]
            if not isinstance(raw, str):
                _fail(source, f"component {cid!r}: source must be a string")
            tokens = tokenize(raw, origin=f"{source}:{cid}")

        ports = []
        for pindex, pentry in enumerate(entry.get("ports") or []):
            if not isinstance(pentry, dict):
                _fail(source, f"component {cid!r}: port #{pindex + 1} "
                              f"must be a mapping")
            try:
                ports.append(Port(
                    name=str(pentry.get("name") or ""),
                    direction=str(pentry.get("direction") or ""),
                    datatype=str(pentry.get("datatype") or "")))
            except ValidationError as exc:
                _fail(source, f"component {cid!r}: {exc}")
        components.append(Component(
            id=cid, name=str(entry.get("name") or cid), kind=str(kind),
            ports=tuple(ports), tokens=tokens))

    try:
        return Product(
            id=str(header["id"]),
            name=str(header.get("name") or header["id"]),
            components=tuple(components))
    except ValidationError as exc:
        _fail(source, str(exc))


def serialize_product_model(product: Product) -> str:
    """Canonical model-file rendering: components sorted by id, tokens
    expanded and sorted. Byte-stable for equal products."""
    doc = {
        "format_version": FORMAT_VERSION,
        "product": {"id": product.id, "name": product.name},
        "components": [
            {
                "id": comp.id,
                "name": comp.name,
                "kind": comp.kind,
                "ports": [
                    {"name": p.name, "direction": p.direction,
                     "datatype": p.datatype}
                    for p in comp.ports
                ],
                "tokens": sorted(comp.tokens.elements()),
            }
            for comp in product.components
        ],
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False,
                          allow_unicode=True, width=10**6)


def write_product_model(product: Product, path) -> None:
    Path(path).write_text(serialize_product_model(product), encoding="utf-8")


# ---------------------------------------------------------------------------
# C source extraction

def _structural_view(clean: str) -> str:
    """Blank literals and preprocessor lines; offsets stay aligned with
    `clean` so spans found here can slice it."""
    buf = list(clean)
    i = 0
    n = len(clean)
    while i < n:
        if clean[i] in "\"'":
            j = _scan_literal(clean, i)
            for k in range(i, j):
                buf[k] = " "
            i = j
        else:
            i += 1
    lines = "".join(buf).split("\n")
    k = 0
    while k < len(lines):
        if lines[k].lstrip().startswith("#"):
            continued = lines[k].rstrip().endswith("\\")
            lines[k] = " " * len(lines[k])
            while continued and k + 1 < len(lines):
                k += 1
                continued = lines[k].rstrip().endswith("\\")
                lines[k] = " " * len(lines[k])
        k += 1
    return "\n".join(lines)


def _match_forward(text: str, start: int, open_ch: str, close_ch: str) -> int:
    depth = 0
    for i in range(start, len(text)):
        c = text[i]
        if c == open_ch:
            depth += 1
        elif c == close_ch:
            depth -= 1
            if depth == 0:
                return i
    return -1


def _identifier_before(text: str, index: int) -> tuple[str, int] | None:
    i = index - 1
    while i >= 0 and text[i].isspace():
        i -= 1
    end = i + 1
    while i >= 0 and (text[i].isalnum() or text[i] == "_"):
        i -= 1
    start = i + 1
    if start == end:
        return None
    word = text[start:end]
    if not _IDENT_ONLY.match(word):
        return None
    return word, start


def _scan_functions(struct: str, origin: str):
    """Yield (name, return_span, params_span, body_span) for every
    top-level function definition found in the structural view."""
    i = 0
    n = len(struct)
    segment_start = 0
    while i < n:
        c = struct[i]
        if c == ";":
            segment_start = i + 1
            i += 1
        elif c == "{":
            # struct/enum/initializer block: opaque, skip it whole
            end = _match_forward(struct, i, "{", "}")
            if end == -1:
                line, column = _position(struct, i)
                raise ParseError("unbalanced braces", source=origin,
                                 line=line, column=column)
            segment_start = end + 1
            i = end + 1
        elif c == "(":
            ident = _identifier_before(struct, i)
            close = _match_forward(struct, i, "(", ")")
            if close == -1:
                line, column = _position(struct, i)
                raise ParseError("unbalanced parentheses", source=origin,
                                 line=line, column=column)
            after = close + 1
            while after < n and struct[after].isspace():
                after += 1
            is_definition = (
                ident is not None
                and ident[0] not in _CONTROL_KEYWORDS
                and after < n and struct[after] == "{"
            )
            if is_definition:
                body_end = _match_forward(struct, after, "{", "}")
                if body_end == -1:
                    line, column = _position(struct, after)
                    raise ParseError("unbalanced braces", source=origin,
                                     line=line, column=column)
                name, name_start = ident
                yield (name, (segment_start, name_start),
                       (i + 1, close), (after + 1, body_end))
                segment_start = body_end + 1
                i = body_end + 1
            else:
                i = close + 1
        else:
            i += 1


def _split_parameters(text: str) -> list[str]:
    parts = []
    depth = 0
    start = 0
    for i, c in enumerate(text):
        if c in "([{":
            depth += 1
        elif c in ")]}":
            depth -= 1
        elif c == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p.strip() for p in parts]


def _parse_parameter(text: str, position: int) -> Port | None:
    """Best-effort parameter port. `void` and empty declarators yield no
    port; unnamed parameters get a positional name."""
    norm = " ".join(text.split())
    if norm in ("", "void"):
        return None
    m = _FN_POINTER.search(norm)
    if m:
        datatype = " ".join((norm[:m.start(1)] + norm[m.end(1):]).split())
        return Port(name=m.group(1), direction="input", datatype=datatype)
    last = None
    depth = 0
    for im in _IDENT.finditer(norm):
        prefix = norm[:im.start()]
        depth = prefix.count("(") + prefix.count("[") \
            - prefix.count(")") - prefix.count("]")
        if depth == 0:
            last = im
    if last is not None and last.group(0) not in _TYPE_KEYWORDS:
        datatype = " ".join((norm[:last.start()] + norm[last.end():]).split())
        return Port(name=last.group(0), direction="input", datatype=datatype)
    return Port(name=f"arg{position}", direction="input", datatype=norm)


def extract_functions(text: str, origin: str) -> list[Component]:
    """Components for every top-level function definition in one file."""
    clean = strip_comments(text, origin)
    struct = _structural_view(clean)
    components = []
    name_uses: Counter = Counter()
    for name, ret_span, params_span, body_span in _scan_functions(struct, origin):
        # signature pieces come from the structural view (preprocessor
        # lines blanked); the body keeps its literals and directives
        return_type = " ".join(struct[ret_span[0]:ret_span[1]].split())
        ports = []
        for k, piece in enumerate(
                _split_parameters(struct[params_span[0]:params_span[1]])):
            port = _parse_parameter(piece, k)
            if port is not None:
                ports.append(port)
        ports.append(Port(name="return", direction="output",
                          datatype=return_type or "int"))
        body = clean[body_span[0]:body_span[1]]
        name_uses[name] += 1
        suffix = "" if name_uses[name] == 1 else f"#{name_uses[name]}"
        components.append(Component(
            id=f"{origin}::{name}{suffix}",
            name=name,
            kind="function",
            ports=tuple(ports),
            tokens=tokenize(body, origin=origin)))
    return components


def extract_c_product(root, product_id: str, *, name: str | None = None,
                      extensions=DEFAULT_SOURCE_EXTENSIONS) -> Product:
    """Extract one product from a C-like source tree.

    One component per top-level function; component ids are
    "relative/path.c::function" (stable across runs and enumeration
    order). Files that cannot be read or scanned are logged and skipped.
    Raises ExtractionError when the root is unusable or no function is
    found at all.
    """
    root_path = Path(root)
    if not root_path.is_dir():
        raise ExtractionError(f"not a readable directory: {root}")
    wanted = {e.lower() for e in extensions}
    files = sorted(p for p in root_path.rglob("*")
                   if p.is_file() and p.suffix.lower() in wanted)
    components: list[Component] = []
    for path in files:
        rel = path.relative_to(root_path).as_posix()
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
            components.extend(extract_functions(text, rel))
        except (OSError, ParseError) as exc:
            log.warning("skipping %s: %s", rel, exc)
    if not components:
        raise ExtractionError(
            f"no functions extracted under {root} "
            f"(extensions: {', '.join(sorted(wanted))})")
    return Product(id=product_id, name=name or product_id,
                   components=tuple(components))
