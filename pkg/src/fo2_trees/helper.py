from fo2_trees.formula import Signature


def split_names(text: str) -> tuple[str, ...]:
    """
    # Split a comma separated list of names, dropping blanks.

    Parameters
    ------
    > text : string

        e.g. 'a, b,,c'

    Returns
    -------
    > tuple of strings

    Example
    -------
    > text = 'a, b'

        return

            ('a', 'b')
    #
    """
    return tuple(name.strip() for name in text.split(",") if name.strip())


def build_signature(unary: str, binary: str = "D", core: str | None = None) -> Signature:
    """
    # Build a Signature from comma separated name lists.

    Parameters
    ----------
    > unary : string

        Unary predicates, e.g. 'a,b'.

    > binary : string

    >> default : 'D'

        Navigational symbols among C, D, N, F; '' for none.

    > core : string or None

    >> default : None

        The singular core; None puts every unary predicate in it.

    Returns
    -------
    > Signature

    Example
    -------
    > unary = 'a,b'

    > binary = 'D,N'

        return

            Signature(unary=('a', 'b'), binary=frozenset({'D', 'N'}))
    #
    """
    return Signature(split_names(unary), frozenset(split_names(binary)), split_names(core) if core else None)


def calc_percent(num: float, denom: float, round_to: int = 2) -> float:
    """
    # Calculate the share given by the two provided numbers.

    Parameters
    ----------
    > num : integer

        The numerator.

    > denom : integer

        The denominator.

    > round_to : integer

    >> default : 2

        The number of decimal places to keep.

    Returns
    -------
    > float

    Example
    -------
    > num = 1

    > denom = 4

        return

            0.25
    #
    """
    if not isinstance(num, (int, float)) or not isinstance(denom, (int, float)) or not isinstance(round_to, (int, float)):
        raise TypeError("'num', 'denom' and 'round_to' must be numeric (int or float).")
    round_to = int(round(abs(round_to), 0))

    return round(num / denom, round_to)
