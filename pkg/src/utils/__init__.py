# AI Testing Agent Utils Package