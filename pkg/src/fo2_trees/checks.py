from pathlib import Path


class Fo2TreesError(Exception):
    """Base class of every error raised by the fo2_trees package."""


class FormulaSyntaxError(Fo2TreesError, ValueError):
    """
    # Raised when formula text does not conform to the grammar.

        Carries the 1-based line and column of the offending token.
    #
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ThirdVariableError(Fo2TreesError, ValueError):
    """A variable other than x or y occurs in a formula."""


class UndeclaredPredicateError(Fo2TreesError, ValueError):
    """A unary predicate is used that the signature does not declare."""


class OrderAtomError(Fo2TreesError, ValueError):
    """An order atom uses a binary symbol that is not in the signature."""


class NotASentenceError(Fo2TreesError, ValueError):
    """A sentence was required but the formula has free variables."""


class SignatureMismatch(Fo2TreesError, ValueError):
    """Two objects that must share a signature do not."""


class PreconditionError(Fo2TreesError, ValueError):
    """An operation was called outside its documented precondition."""


class UnguardedFormulaError(Fo2TreesError, ValueError):
    """A guarded (GF2) formula was required."""


class InvalidTypeError(Fo2TreesError, ValueError):
    """A full type violates its cardinality or emptiness constraints."""


class QBFShapeError(Fo2TreesError, ValueError):
    """A QBF instance does not have the required quantifier prefix."""


class ConfigError(Fo2TreesError, ValueError):
    """The configuration file is missing a section or a key."""


BINARY_SYMBOLS = ("C", "D", "N", "F")
RESERVED_NAMES = {"x", "y", "exists", "forall", "true", "false", "pos"}
MAX_UNARY = 64


def validate_signature(unary: tuple[str, ...], binary: frozenset[str], singular_core: tuple[str, ...] | None) -> None:
    """
    # Check the parts of a signature before it is built.

        Raises a ValueError() subclass if a predicate name is empty,
        duplicated, reserved or badly formed, if a binary symbol is
        unknown, or if the singular core is not a subset of the
        unary predicates. Otherwise returns nothing.

    Parameters
    ----------
    > unary : tuple of strings

        The unary alphabet, in bit order.

    > binary : frozenset of strings

        Subset of {'C', 'D', 'N', 'F'} (child, descendant,
        next sibling, following sibling).

    > singular_core : tuple of strings or None

        The predicates on which singular trees carry exactly one label.

    Returns
    -------
    > None

    Example
    -------
    > unary = ('a', 'a')

        raise

            PreconditionError: duplicate unary predicates ['a']
    #
    """
    if len(unary) > MAX_UNARY:
        raise PreconditionError(f"at most {MAX_UNARY} unary predicates are supported, got {len(unary)}")

    seen = set()
    duplicates = []
    for name in unary:
        if not name:
            raise PreconditionError("unary predicate names must be nonempty")
        if name in RESERVED_NAMES:
            raise PreconditionError(f"'{name}' is reserved and cannot name a predicate")
        if not (name[0].islower() or name[0] == "_") or not all(ch.isalnum() or ch == "_" for ch in name):
            raise PreconditionError(f"invalid predicate name: {name!r}")
        if name in seen:
            duplicates.append(name)
        seen.add(name)
    if duplicates:
        raise PreconditionError(f"duplicate unary predicates {sorted(duplicates)}")

    unknown = set(binary) - set(BINARY_SYMBOLS)
    if unknown:
        raise PreconditionError(f"unknown binary symbols {sorted(unknown)}; allowed: {list(BINARY_SYMBOLS)}")

    if singular_core is not None:
        missing = set(singular_core) - seen
        if missing:
            raise PreconditionError(f"singular core {sorted(missing)} not among the unary predicates")
        if not singular_core:
            raise PreconditionError("singular core must be nonempty when given")

    return None


def validate_extension(ext: str) -> str:
    """
    # Check that the extension of a results file name is a valid type.

        Raises a ValueError() if the extension is not one of
        .txt/.csv/.xlsx. Otherwise returns the extension.

    Parameters
    ----------
    > ext : str

        Must contain a '.', e.g. '.xlsx'

    Returns
    -------
    > string

    Example
    -------
    > ext = '.csv'

        return

            '.csv'
    #
    """
    allowed = [".xlsx", ".csv", ".txt"]

    if ext not in allowed:
        raise ValueError(f"results file must have a valid extension: {allowed}")

    return ext


def validate_filename(path_arg: str | Path) -> Path:
    """
    # Validate that the provided path is a bare file name with an extension.

    Parameters
    ----------
    > path_arg : string or Path object

    Returns
    -------
    > Path object

        Path(path_arg) if checks pass. Otherwise, raise a ValueError().

    Example
    -------
    > path_arg = 'oracle_differential.csv'

        return

            Path('oracle_differential.csv')

    > path_arg = 'results/oracle_differential.csv'

        raise

            ValueError()
    #
    """
    p = Path(path_arg)

    if p.parent != Path("."):
        raise ValueError(f"Argument must be a filename, not a path: {path_arg}")

    if p.suffix == "":
        raise ValueError(f"Filename must have an extension: {path_arg}")

    return p


def validate_config(config: dict, required: dict[str, set[str]]) -> None:
    """
    # Check that a loaded configuration holds every required section and key.

        Raises a ConfigError() naming the first missing section, or the
        missing keys of a section. Otherwise returns nothing.

    Parameters
    ----------
    > config : dictionary

        The result of yaml.safe_load on the config file.

    > required : dictionary of section name -> set of key names

    Returns
    -------
    > None

    Example
    -------
    > config = {'solver': {'search_budget': 10}}

    > required = {'solver': {'search_budget', 'phases'}}

        raise

            ConfigError: config section 'solver' is missing keys ['phases']
    #
    """
    if not isinstance(config, dict):
        raise ConfigError("config file must contain a mapping at the top level")

    for section, keys in required.items():
        if section not in config or not isinstance(config[section], dict):
            raise ConfigError(f"config section '{section}' is missing")
        missing = set(keys) - set(config[section])
        if missing:
            raise ConfigError(f"config section '{section}' is missing keys {sorted(missing)}")

    return None
