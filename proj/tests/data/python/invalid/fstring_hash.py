f'{a#}'
