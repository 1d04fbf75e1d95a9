import json
import re
from datetime import date
from importlib.metadata import version
from pathlib import Path

import pandas as pd

from fo2_trees.checks import FormulaSyntaxError, validate_extension, validate_filename
from fo2_trees.formula import Formula, Signature, parse_formula, pretty
from fo2_trees.helper import build_signature
from fo2_trees.model import Tree

_HEADER = re.compile(r"^#\s*sig:\s*(?P<fields>.*)$")


def parse_signature_header(line: str) -> Signature:
    """
    # Read the signature header of a formula file.

        The header looks like '# sig: unary=a,b bin=D,C core=a'. bin
        defaults to D and core to every unary predicate.

    Parameters
    ----------
    > line : string

    Returns
    -------
    > Signature

    Example
    -------
    > line = '# sig: unary=a,b bin='

        return

            Signature(unary=('a', 'b'), binary=frozenset())
    #
    """
    match = _HEADER.match(line.strip())
    if match is None:
        raise FormulaSyntaxError("formula files start with a '# sig: unary=...' header", 1, 1)
    fields = {}
    for item in match.group("fields").split():
        key, _, value = item.partition("=")
        fields[key] = value
    if "unary" not in fields:
        raise FormulaSyntaxError("the signature header needs unary=...", 1, 1)
    return build_signature(fields["unary"], fields.get("bin", "D"), fields.get("core"))


def format_signature_header(sig: Signature) -> str:
    parts = [f"unary={','.join(sig.unary)}", f"bin={','.join(sorted(sig.binary))}"]
    if sig.singular_core is not None:
        parts.append(f"core={','.join(sig.singular_core)}")
    return "# sig: " + " ".join(parts)


def read_formula_file(file: str | Path) -> tuple[Formula, Signature]:
    """
    # Read a formula file: a signature header line followed by the formula text.

        Raises FileNotFoundError() if the file does not exist.

    Parameters
    ----------
    > file : string or Path object

    Returns
    -------
    > (Formula, Signature)
    #
    """
    path = Path(file)
    if not path.exists():
        raise FileNotFoundError(f"Input formula file does not exist: {path}")
    text = path.read_text()
    lines = text.splitlines()
    first = next((i for i, line in enumerate(lines) if line.strip()), None)
    if first is None:
        raise FormulaSyntaxError(f"formula file is empty: {path}")
    sig = parse_signature_header(lines[first])
    return parse_formula("\n".join(lines[first + 1:]), sig), sig


def write_formula_file(file: str | Path, f: Formula, sig: Signature) -> Path:
    path = Path(file)
    path.write_text(format_signature_header(sig) + "\n" + pretty(f) + "\n")
    return path


def read_tree(file: str | Path) -> Tree:
    """Load a tree from its JSON document; raises FileNotFoundError() if the file does not exist."""
    path = Path(file)
    if not path.exists():
        raise FileNotFoundError(f"Input tree file does not exist: {path}")
    return Tree.from_dict(json.loads(path.read_text()))


def write_tree(file: str | Path, t: Tree) -> Path:
    path = Path(file)
    path.write_text(json.dumps(t.to_dict(), indent=2) + "\n")
    return path


def construct_results_filename(file: str | Path, append_today: bool = True, append_version: bool = True) -> Path:
    """
    # Modifies the file name for the results file and returns it as a Path object.

        (default) Optionally appends today's date and
        package version.

    Parameters
    ----------
    > file : string or Path object

        The file name including extension. Do not include its path.

    > append_today : boolean (True/False)

    >> default = True

        Append today's date to the file name in the format yyyy-mm-dd

    > append_version : boolean (True/False)

    >> default = True

        Append the version of the fo2_trees package used to the file name, e.g. 'v0-1-0'

    Returns
    -------
    > Path object

        A modified file name as a Path object.

    Example
    -------
    > file = 'acceptance.xlsx'

    > append_today = True

    > append_version = True

        return

            Path('acceptance_2026-10-19_v0-1-0.xlsx')
    #
    """
    file = validate_filename(file)
    todays_date = date.today().strftime("%Y-%m-%d") if append_today else None
    pkg_version = "".join(["v", version("fo2_trees").replace(".", "-")]) if append_version else None

    # Remove None's/blanks
    parts = [file.stem, todays_date, pkg_version]
    parts = [p for p in parts if p]

    return Path("_".join(parts) + file.suffix)


def output_results(
    df: pd.DataFrame,
    file_path: str | Path,
    append_today: bool = True,
    append_version: bool = True,
    sheet_name: str = "Python Output",
) -> Path:
    """
    # Output a results table to the provided file.

        Infers file type from file name.
        Allowed file types: .csv, .xlsx, .txt

        If .xlsx, adds or overwrites the sheet sheet_name.

    Parameters
    ----------
    > df : pandas DataFrame

    > file_path : string or Path object

        A full file path and file name including extension.

    > append_today : boolean (True/False)

    >> default = True

    > append_version : boolean (True/False)

    >> default = True

    > sheet_name : string

    >> default = 'Python Output'

    Returns
    -------
    > Path object

        The file written.
    #
    """
    file_path = Path(file_path)
    file = file_path.name
    if not file:
        raise ValueError(f"file_path must have a filename: {file_path}")

    file = construct_results_filename(file, append_today=append_today, append_version=append_version)

    outfile = file_path.parent / file
    ext = validate_extension(outfile.suffix)

    if ext == ".xlsx":
        if outfile.exists():
            with pd.ExcelWriter(outfile, engine="openpyxl", mode="a", if_sheet_exists="replace") as writer:
                df.to_excel(writer, sheet_name=sheet_name, index=False)
        else:
            with pd.ExcelWriter(outfile, engine="openpyxl") as writer:
                df.to_excel(writer, sheet_name=sheet_name, index=False)
    if ext == ".csv":
        df.to_csv(outfile, index=False)
    if ext == ".txt":
        df.to_csv(outfile, index=False, sep="\t")

    return outfile
