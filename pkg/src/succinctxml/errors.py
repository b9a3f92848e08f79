class XMLSyntaxError(ValueError):
    """Malformed XML input; ``offset`` is the byte offset reported by the parser."""

    def __init__(self, message: str, offset: int = -1):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class RejectedInputError(ValueError):
    pass


class XPathSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnsupportedQueryError(ValueError):
    """The query is well-formed XPath but uses a construct outside the supported fragment."""

    def __init__(self, construct: str):
        super().__init__(f"unsupported XPath construct: {construct}")
        self.construct = construct


class IndexFormatError(IOError):
    pass


class MissingSectionError(IndexFormatError):
    pass
