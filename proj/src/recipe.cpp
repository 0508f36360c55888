namespace mck {}
