[**a]
